import type { ApiClient } from '../services/api';
import type { Contribution, EmployeeDetail, EmployeeSummary, RiskFilter, SortKey } from '../types';
import { clear, el, on } from '../utils/dom';
import { fmtPoints, fmtProbability, fmtYearsMonths } from '../utils/format';

interface RiskState {
  risk: RiskFilter;
  sort: SortKey;
  threshold: number;
}

/**
 * Attrition deep-dive: sortable risk table plus a per-employee drawer.
 *
 * Sorting and filtering go through the API so the order matches what the
 * server would report; the threshold slider only re-labels rows on the
 * client from the probability field each row already carries.
 */
export class RiskView {
  private readonly state: RiskState = { risk: 'all', sort: 'probability', threshold: 0.5 };
  private rows: EmployeeSummary[] = [];
  private table!: HTMLTableSectionElement;
  private drawer!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  async render(): Promise<void> {
    const list = await this.api.employees(this.state.risk, this.state.sort);
    this.rows = list.employees;

    const controls = el('div', 'controls');
    controls.appendChild(this.filterSelect());
    controls.appendChild(this.sortSelect());
    controls.appendChild(this.thresholdSlider());

    const table = el('table', 'risk-table');
    const head = el('thead');
    const headRow = el('tr');
    for (const label of ['Employee', 'Role', 'Probability', 'Lead time', 'Top reason', 'Dimension']) {
      headRow.appendChild(el('th', '', label));
    }
    head.appendChild(headRow);
    this.table = el('tbody');
    table.appendChild(head);
    table.appendChild(this.table);

    this.drawer = el('aside', 'drawer');
    this.drawer.id = 'detail-drawer';

    this.root.replaceChildren(el('h2', '', 'Attrition risk'), controls, table, this.drawer);
    this.renderRows();
  }

  private filterSelect(): HTMLElement {
    const select = el('select');
    select.id = 'risk-filter';
    for (const value of ['all', 'high']) {
      const opt = el('option', '', value === 'all' ? 'everyone' : 'predicted leavers');
      opt.value = value;
      select.appendChild(opt);
    }
    select.value = this.state.risk;
    on(select, 'change', () => {
      this.state.risk = select.value as RiskFilter;
      void this.render();
    });
    return select;
  }

  private sortSelect(): HTMLElement {
    const select = el('select');
    select.id = 'risk-sort';
    for (const [value, label] of [
      ['probability', 'highest risk first'],
      ['lead_time', 'least lead time first'],
      ['id', 'by employee id'],
    ] as const) {
      const opt = el('option', '', label);
      opt.value = value;
      select.appendChild(opt);
    }
    select.value = this.state.sort;
    on(select, 'change', () => {
      this.state.sort = select.value as SortKey;
      void this.render();
    });
    return select;
  }

  private thresholdSlider(): HTMLElement {
    const wrap = el('label', 'slider');
    wrap.appendChild(el('span', '', 'Risk threshold'));
    const input = el('input');
    input.id = 'risk-threshold';
    input.type = 'range';
    input.min = '0';
    input.max = '1';
    input.step = '0.05';
    input.value = String(this.state.threshold);
    const readout = el('span', 'slider-value', fmtProbability(this.state.threshold));
    on(input, 'input', () => {
      this.state.threshold = Number(input.value);
      readout.textContent = fmtProbability(this.state.threshold);
      this.renderRows(); // relabel only; values and order stay put
    });
    wrap.appendChild(input);
    wrap.appendChild(readout);
    return wrap;
  }

  private renderRows(): void {
    clear(this.table);
    for (const row of this.rows) {
      const tr = el('tr', row.attrition_probability >= this.state.threshold ? 'above-threshold' : '');
      tr.dataset.id = row.id;

      const idCell = el('td', 'emp-id', row.id);
      const role = el('td', '', row.JobRole ?? '');
      if (row.Department) role.title = row.Department;

      const prob = el('td', 'prob', fmtProbability(row.attrition_probability));

      const lead = el('td', 'lead');
      lead.appendChild(el('span', '', fmtYearsMonths(row.lead_time)));
      if (row.overdue) lead.appendChild(el('span', 'badge overdue', 'overdue'));

      const reason = el('td', 'reason', row.top_reason);
      const dim = el('td');
      if (row.top_dimension) dim.appendChild(el('span', 'badge dim', row.top_dimension));

      tr.append(idCell, role, prob, lead, reason, dim);
      on(tr, 'click', () => void this.openDrawer(row.id));
      this.table.appendChild(tr);
    }
  }

  private async openDrawer(id: string): Promise<void> {
    const detail = await this.api.employee(id);
    renderDetail(this.drawer, detail);
  }
}

/** Driver bars and tenure timeline for one employee. Exported for tests. */
export function renderDetail(drawer: HTMLElement, detail: EmployeeDetail): void {
  clear(drawer);
  drawer.classList.add('open');

  const head = el('div', 'drawer-head');
  head.appendChild(el('h3', '', `Employee ${detail.id}`));
  const prob = el('span', 'drawer-prob', fmtProbability(detail.attrition_probability));
  prob.id = 'drawer-probability';
  head.appendChild(prob);
  head.appendChild(el('span', `badge label-${detail.label.toLowerCase()}`, detail.label));
  drawer.appendChild(head);

  drawer.appendChild(tenureTimeline(detail));
  drawer.appendChild(driverBars(detail.drivers.bias, detail.drivers.contributions));

  const reasons = el('ol', 'reasons');
  for (const text of detail.drivers.top_reasons) {
    reasons.appendChild(el('li', '', text));
  }
  drawer.appendChild(reasons);
}

function tenureTimeline(detail: EmployeeDetail): HTMLElement {
  const t = detail.tenure;
  const wrap = el('div', 'timeline');
  wrap.appendChild(el('h4', '', 'Tenure'));
  const span = Math.max(t.ttl, t.current_tenure, 1);
  const track = el('div', 'timeline-track');
  const served = el('div', 'timeline-served');
  served.style.width = `${(t.current_tenure / span) * 100}%`;
  const predicted = el('div', 'timeline-predicted');
  predicted.style.width = `${(Math.max(t.ttl, 0) / span) * 100}%`;
  track.appendChild(predicted);
  track.appendChild(served);
  wrap.appendChild(track);
  const caption = el('div', 'timeline-caption',
    `served ${fmtYearsMonths(t.current_tenure)} of ${fmtYearsMonths(t.ttl)} predicted, ` +
    `lead ${fmtYearsMonths(t.lead_time)}`);
  if (t.overdue) caption.appendChild(el('span', 'badge overdue', 'overdue'));
  wrap.appendChild(caption);
  return wrap;
}

/**
 * Signed horizontal bars, one per contribution. Positive deltas push
 * toward attrition (red, right), negative ones retain (green, left).
 * Widths are scaled for display; the printed points come straight from
 * each delta field.
 */
export function driverBars(bias: number, contributions: Contribution[]): HTMLElement {
  const wrap = el('div', 'drivers');
  wrap.appendChild(el('h4', '', 'Drivers'));
  wrap.appendChild(el('div', 'bias-line', `baseline ${fmtProbability(bias)}`));

  const maxAbs = Math.max(...contributions.map((c) => Math.abs(c.delta)), 1e-9);
  const list = el('div', 'bar-list');
  for (const c of contributions) {
    const row = el('div', 'bar-row');
    row.dataset.feature = c.feature;
    row.dataset.delta = String(c.delta);
    row.appendChild(el('span', 'bar-label', c.feature));

    const track = el('div', 'bar-track');
    const bar = el('div', `bar ${c.delta >= 0 ? 'push' : 'retain'}`);
    bar.style.width = `${(Math.abs(c.delta) / maxAbs) * 50}%`;
    track.appendChild(bar);
    row.appendChild(track);

    row.appendChild(el('span', 'bar-points', fmtPoints(c.delta)));
    row.appendChild(el('span', 'badge dim', c.dimension));
    list.appendChild(row);
  }
  wrap.appendChild(list);
  return wrap;
}
