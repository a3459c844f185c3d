import type { ApiClient } from '../services/api';
import { el } from '../utils/dom';
import { fmtCount, fmtMoney, fmtPercent } from '../utils/format';

/** Organizational overview: headline numbers straight off /api/overview. */
export async function renderOverview(root: HTMLElement, api: ApiClient): Promise<void> {
  const data = await api.overview();

  const cards = el('div', 'cards');
  const card = (id: string, label: string, value: string) => {
    const box = el('div', 'card');
    const v = el('div', 'card-value', value);
    v.id = id;
    box.appendChild(v);
    box.appendChild(el('div', 'card-label', label));
    cards.appendChild(box);
  };

  card('stat-headcount', 'Employees', fmtCount(data.headcount));
  card('stat-compensation', 'Average CTC', fmtMoney(data.mean_compensation));
  card('stat-attrition', 'Attrition ratio', fmtPercent(data.attrition_ratio));
  card('stat-predicted', 'Predicted attrition', fmtPercent(data.predicted_attrition_ratio));
  card('stat-flagged', 'Flagged at risk', fmtCount(data.flagged));

  const counts = el('div', 'class-counts');
  for (const [label, n] of Object.entries(data.class_counts)) {
    counts.appendChild(el('span', 'count-chip', `${label}: ${fmtCount(n)}`));
  }

  const footer = el('div', 'footnote',
    `model ${data.model_checksum.slice(0, 18)}…  scored ${data.scored_at}`);

  root.replaceChildren(el('h2', '', 'Organization'), cards, counts, footer);
}
