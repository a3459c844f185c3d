import type { ApiClient } from '../services/api';
import type { ModelInfo, ScreenResult, WhatifResult } from '../types';
import { clear, el, on } from '../utils/dom';
import { fmtPercent, fmtPoints, fmtProbability, fmtYearsMonths } from '../utils/format';
import { driverBars } from './risk';

/**
 * Dashboard 3: what-if on an existing employee plus candidate screening.
 * The screening form is generated from /api/model schema metadata, so a
 * model trained on different columns reshapes the form without a deploy.
 */
export class ScreeningView {
  private model!: ModelInfo;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async render(): Promise<void> {
    this.model = await this.api.model();

    const whatif = el('section', 'panel');
    whatif.id = 'whatif-panel';
    this.renderWhatifForm(whatif);

    const screen = el('section', 'panel');
    screen.id = 'screen-panel';
    this.renderScreenForm(screen);

    this.root.replaceChildren(el('h2', '', 'Screening and what-if'), whatif, screen);
  }

  // columns a user may override or enter: everything except the label
  private editableColumns() {
    return this.model.schema.columns.filter((c) => c.name !== this.model.schema.target);
  }

  private renderWhatifForm(panel: HTMLElement): void {
    panel.appendChild(el('h3', '', 'What-if'));
    const form = el('form', 'whatif-form');

    const idLabel = el('label', 'field');
    idLabel.appendChild(el('span', '', 'Employee id'));
    const idInput = el('input');
    idInput.id = 'whatif-id';
    idInput.required = true;
    idLabel.appendChild(idInput);
    form.appendChild(idLabel);

    const overrides = el('div', 'override-rows');
    overrides.id = 'override-rows';
    form.appendChild(overrides);

    const addRow = el('button', 'ghost', 'add override');
    addRow.type = 'button';
    on(addRow, 'click', () => overrides.appendChild(this.overrideRow()));
    form.appendChild(addRow);

    const submit = el('button', '', 'Run what-if');
    submit.id = 'whatif-submit';
    submit.type = 'submit';
    form.appendChild(submit);

    const result = el('div', 'result');
    result.id = 'whatif-result';

    on(form, 'submit', (ev) => {
      ev.preventDefault();
      const id = idInput.value.trim();
      if (!id) return;
      const body: Record<string, string> = {};
      overrides.querySelectorAll<HTMLElement>('.override-row').forEach((row) => {
        const column = row.querySelector<HTMLSelectElement>('select')!.value;
        const value = row.querySelector<HTMLInputElement>('input')!.value;
        if (column && value !== '') body[column] = value;
      });
      this.api
        .whatif(id, body)
        .then((r) => renderWhatifResult(result, r))
        .catch((err) => renderInlineError(result, err));
    });

    panel.appendChild(form);
    panel.appendChild(result);
  }

  private overrideRow(): HTMLElement {
    const row = el('div', 'override-row');
    const select = el('select');
    const blank = el('option', '', 'column');
    blank.value = '';
    select.appendChild(blank);
    for (const col of this.editableColumns()) {
      if (col.name === this.model.schema.id) continue;
      const opt = el('option', '', col.name);
      opt.value = col.name;
      select.appendChild(opt);
    }
    const value = el('input');
    value.placeholder = 'new value';
    row.append(select, value);
    return row;
  }

  private renderScreenForm(panel: HTMLElement): void {
    panel.appendChild(el('h3', '', 'Candidate screening'));
    const form = el('form', 'screen-form');
    form.id = 'screen-form';

    const idLabel = el('label', 'field');
    idLabel.appendChild(el('span', '', 'Requisition / candidate id'));
    const candidateId = el('input');
    candidateId.id = 'candidate-id';
    idLabel.appendChild(candidateId);
    form.appendChild(idLabel);

    const inputs = new Map<string, HTMLInputElement>();
    for (const col of this.editableColumns()) {
      const label = el('label', 'field');
      const caption = el('span', '', col.required ? `${col.name} *` : col.name);
      label.appendChild(caption);
      const input = el('input');
      input.name = col.name;
      input.dataset.kind = col.kind;
      if (col.levels) input.placeholder = col.levels.join(' | ');
      label.appendChild(input);
      form.appendChild(label);
      inputs.set(col.name, input);
    }

    const submit = el('button', '', 'Score candidate');
    submit.id = 'screen-submit';
    submit.type = 'submit';
    form.appendChild(submit);

    const result = el('div', 'result');
    result.id = 'screen-result';

    on(form, 'submit', (ev) => {
      ev.preventDefault();
      const candidate: Record<string, string> = {};
      let valid = true;
      for (const col of this.editableColumns()) {
        const input = inputs.get(col.name)!;
        const value = input.value.trim();
        input.classList.toggle('invalid', col.required && value === '');
        if (col.required && value === '') valid = false;
        if (value !== '') candidate[col.name] = value;
      }
      if (!valid) {
        renderInlineError(result, new Error('fill the required fields marked *'));
        return;
      }
      this.api
        .screen(candidate, candidateId.value.trim() || 'candidate')
        .then((r) => renderScreenResult(result, r))
        .catch((err) => renderInlineError(result, err));
    });

    panel.appendChild(form);
    panel.appendChild(result);
  }
}

/** Before/after panel; every number is a field from the what-if response. */
export function renderWhatifResult(root: HTMLElement, r: WhatifResult): void {
  clear(root);
  const grid = el('div', 'delta-grid');
  const cell = (id: string, label: string, value: string) => {
    const box = el('div', 'delta-cell');
    const v = el('div', 'delta-value', value);
    v.id = id;
    box.appendChild(v);
    box.appendChild(el('div', 'card-label', label));
    grid.appendChild(box);
  };
  cell('wi-before', 'before', fmtProbability(r.before.attrition_probability));
  cell('wi-after', 'after', fmtProbability(r.after.attrition_probability));
  cell('wi-delta-prob', 'probability delta', fmtPoints(r.delta.probability) + ' pts');
  cell('wi-delta-ttl', 'tenure delta', fmtYearsMonths(r.delta.ttl));
  cell('wi-delta-lead', 'lead time delta', fmtYearsMonths(r.delta.lead_time));
  const label = el('div', 'delta-label',
    r.delta.label_changed ? 'prediction flips' : 'prediction unchanged');
  label.id = 'wi-label-changed';
  root.append(grid, label);
}

export function renderScreenResult(root: HTMLElement, r: ScreenResult): void {
  clear(root);
  const gauge = el('div', 'gauge');
  const fill = el('div', 'gauge-fill');
  fill.style.width = fmtPercent(r.fitment_score, 1);
  gauge.appendChild(fill);
  const value = el('span', 'gauge-value', fmtPercent(r.fitment_score, 1));
  value.id = 'fitment-score';
  gauge.appendChild(value);

  const tenure = el('div', '', `predicted tenure ${fmtYearsMonths(r.predicted_total_tenure)}`);
  tenure.id = 'screen-tenure';

  root.append(el('h4', '', `Fitment for ${r.candidate_id ?? 'candidate'}`), gauge, tenure,
    driverBars(r.drivers.bias, r.drivers.contributions));
}

export function renderInlineError(root: HTMLElement, err: unknown): void {
  clear(root);
  const message = err instanceof Error ? err.message : String(err);
  root.appendChild(el('div', 'banner error', message));
}
