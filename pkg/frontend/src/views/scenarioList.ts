import { clear, el } from '../render';
import { ScenarioPage, ScenarioRow, SpecDoc } from '../types';

export interface ScenarioListCallbacks {
  onSelect(scenarioId: number): void;
  onSort(key: string): void;
}

// Scenario List View: one table row per scenario summarizing its
// attribute changes and predicted score changes as signed bars, green for
// positive and red for negative. Clicking a row selects the scenario in
// every other view; clicking a column header sorts server-side.
export class ScenarioListView {
  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: ScenarioListCallbacks,
  ) {}

  render(page: ScenarioPage, spec: SpecDoc, selected: ReadonlySet<number>): void {
    clear(this.root);
    const columns: { key: string; label: string }[] = [
      ...spec.attributes.map((a) => ({ key: a.id, label: a.id })),
      ...spec.indicators.map((i) => ({ key: i.id, label: i.id })),
      { key: 'final', label: 'final' },
    ];

    const maxAbs = new Map<string, number>();
    for (const column of columns) {
      let extreme = 0;
      for (const row of page.scenarios) {
        extreme = Math.max(Math.abs(this.delta(row, column.key)), extreme);
      }
      maxAbs.set(column.key, extreme || 1);
    }

    const table = el('table', { class: 'scenario-list' });
    const head = el('tr');
    head.appendChild(el('th', {}, 'scenario'));
    for (const column of columns) {
      const th = el('th', { class: 'sortable', 'data-sort-key': column.key }, column.label);
      th.addEventListener('click', () => this.callbacks.onSort(column.key));
      head.appendChild(th);
    }
    head.appendChild(el('th', {}, 'rank'));
    table.appendChild(el('thead')).appendChild(head);

    const body = el('tbody');
    for (const row of page.scenarios) {
      const tr = el('tr', {
        class: selected.has(row.scenario_id) ? 'scenario-row selected' : 'scenario-row',
        'data-scenario-id': String(row.scenario_id),
      });
      tr.addEventListener('click', () => this.callbacks.onSelect(row.scenario_id));
      tr.appendChild(el('td', { class: 'scenario-id' }, String(row.scenario_id)));
      for (const column of columns) {
        tr.appendChild(this.deltaCell(row, column.key, maxAbs.get(column.key)!));
      }
      tr.appendChild(el('td', { class: 'rank-cell' }, String(row.modal_rank)));
      body.appendChild(tr);
    }
    table.appendChild(body);

    this.root.appendChild(el('div', { class: 'view-title' }, `Scenario List (${page.total})`));
    this.root.appendChild(table);
  }

  private delta(row: ScenarioRow, key: string): number {
    if (key === 'final') return row.final.mean_delta;
    if (key in row.attributes) return row.attributes[key].delta;
    return row.indicators[key].mean_delta;
  }

  private deltaCell(row: ScenarioRow, key: string, extreme: number): HTMLTableCellElement {
    const value = this.delta(row, key);
    const td = el('td', { class: 'delta-cell' });
    const bar = el('div', { class: 'bar' });
    const fill = el('div', {
      class: value >= 0 ? 'bar-fill delta-pos' : 'bar-fill delta-neg',
      'data-delta': String(value),
    });
    fill.style.width = `${(Math.abs(value) / extreme) * 100}%`;
    bar.appendChild(fill);
    td.appendChild(bar);
    td.appendChild(el('span', { class: 'delta-label' }, value.toFixed(2)));
    return td;
  }
}
