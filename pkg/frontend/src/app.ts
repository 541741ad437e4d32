import { ApiClient } from './api';
import { clear, el } from './render';
import { decodeState, defaultState, encodeState, ViewState } from './state';
import { ScenarioPage, ScenarioRow, SessionInfo, SummaryDoc } from './types';
import { AnalysisColumnsView } from './views/analysisColumns';
import { RelationshipGridView } from './views/relationshipGrid';
import { RivalViewsView } from './views/rivalViews';
import { ScenarioListView } from './views/scenarioList';

export interface WorkbenchOptions {
  root: HTMLElement;
  api: ApiClient;
  initialQuery?: string;
  onStateChange?(query: string): void;
}

// The workbench owns one shared ViewState (selection, sort, method,
// highlight) and five renderers. Every interaction updates the state,
// refetches the affected products from the service, rerenders, and
// serializes the state back to the URL. The UI computes nothing itself:
// filters run server-side via the session filter log, so what the analyst
// sees is exactly what a replay of the log would reproduce.
export class Workbench {
  state: ViewState;
  session!: SessionInfo;
  page: ScenarioPage | null = null;

  private readonly api: ApiClient;
  private readonly onStateChange?: (query: string) => void;
  private readonly panels: Record<string, HTMLElement> = {};
  private listView!: ScenarioListView;
  private analysisView!: AnalysisColumnsView;
  private gridView!: RelationshipGridView;
  private rivalView!: RivalViewsView;

  constructor(options: WorkbenchOptions) {
    this.api = options.api;
    this.onStateChange = options.onStateChange;
    this.state = options.initialQuery
      ? decodeState(options.initialQuery)
      : defaultState('');
    this.buildShell(options.root);
  }

  private buildShell(root: HTMLElement): void {
    clear(root);
    const top = el('div', { class: 'workbench-top' });
    const bottom = el('div', { class: 'workbench-bottom' });
    for (const name of ['analysis', 'relationships', 'rivals'] as const) {
      this.panels[name] = el('div', { class: `panel panel-${name}`, id: `panel-${name}` });
      top.appendChild(this.panels[name]);
    }
    this.panels.toolbar = el('div', { class: 'panel panel-toolbar', id: 'panel-toolbar' });
    this.panels.list = el('div', { class: 'panel panel-list', id: 'panel-list' });
    bottom.appendChild(this.panels.toolbar);
    bottom.appendChild(this.panels.list);
    root.appendChild(top);
    root.appendChild(bottom);

    this.listView = new ScenarioListView(this.panels.list, {
      onSelect: (id) => void this.toggleSelect(id),
      onSort: (key) => void this.setSort(key),
    });
    this.analysisView = new AnalysisColumnsView(this.panels.analysis, {
      onBrush: (subject, low, high) => void this.brushFilter(subject, low, high),
    });
    this.gridView = new RelationshipGridView(this.panels.relationships);
    this.rivalView = new RivalViewsView(this.panels.rivals, {
      onMethod: (method) => void this.setMethod(method),
      onHighlight: (rival) => void this.setHighlight(rival),
    });
  }

  async init(sessionId?: string): Promise<void> {
    if (sessionId) this.state.sessionId = sessionId;
    this.session = await this.api.sessionInfo(this.state.sessionId);
    if (!this.session.methods.includes(this.state.method)) {
      this.state.method = this.session.methods[0];
    }
    await this.refreshScenarios();
    await this.refreshSummaries();
    await this.refreshSelectionViews();
    this.renderToolbar();
    this.syncUrl();
  }

  get selectedRows(): ScenarioRow[] {
    if (!this.page) return [];
    const byId = new Map(this.page.scenarios.map((row) => [row.scenario_id, row]));
    return this.state.selected
      .map((id) => byId.get(id))
      .filter((row): row is ScenarioRow => row !== undefined);
  }

  private get focusScenario(): number | null {
    return this.state.selected.length
      ? this.state.selected[this.state.selected.length - 1]
      : null;
  }

  async refreshScenarios(): Promise<void> {
    const page = await this.api.scenarios(this.state.sessionId, {
      sort: this.state.sortKey ?? undefined,
      dir: this.state.sortKey ? this.state.sortDir : undefined,
      page: this.state.page,
    });
    if (!page) return; // stale response discarded
    this.page = page;
    // Selections must reference scenarios in the current filtered set.
    if (page.scenarios.length === page.total) {
      const present = new Set(page.scenarios.map((row) => row.scenario_id));
      this.state.selected = this.state.selected.filter((id) => present.has(id));
    }
    this.listView.render(page, this.session.spec, new Set(this.state.selected));
  }

  async refreshSummaries(): Promise<void> {
    const spec = this.session.spec;
    const attributeSummaries: SummaryDoc[] = [];
    for (const attribute of spec.attributes) {
      attributeSummaries.push(
        await this.api.summary(this.state.sessionId, `attr:${attribute.id}`),
      );
    }
    const indicatorSummaries: SummaryDoc[] = [];
    for (const indicator of spec.indicators) {
      indicatorSummaries.push(
        await this.api.summary(this.state.sessionId, `ind:${indicator.id}`),
      );
    }
    const finalSummary = await this.api.summary(this.state.sessionId, 'final');
    this.analysisView.render(
      attributeSummaries,
      indicatorSummaries,
      finalSummary,
      this.selectedRows,
    );
  }

  async refreshSelectionViews(): Promise<void> {
    const relationships = this.panels.relationships;
    const rivals = this.panels.rivals;
    if (this.focusScenario === null) {
      clear(relationships);
      relationships.appendChild(
        el('div', { class: 'empty-hint' }, 'select scenarios in the list to compare'),
      );
      clear(rivals);
      rivals.appendChild(
        el('div', { class: 'empty-hint' }, 'select a scenario to compare with rivals'),
      );
      return;
    }
    const matrix = await this.api.influence(this.state.sessionId, this.state.selected);
    if (matrix) this.gridView.render(matrix, this.selectedRows, this.session.spec);

    if (this.session.rivals.length) {
      const heat = await this.api.heatmap(this.state.sessionId, this.focusScenario);
      const radar = await this.api.radar(
        this.state.sessionId,
        this.focusScenario,
        this.state.method,
        this.state.highlight ?? undefined,
      );
      if (heat && radar) {
        this.rivalView.render(heat, radar, this.session.spec, this.state.highlight);
      }
    } else {
      clear(rivals);
      rivals.appendChild(el('div', { class: 'empty-hint' }, 'session has no rivals'));
    }
  }

  private renderToolbar(): void {
    const toolbar = this.panels.toolbar;
    clear(toolbar);
    toolbar.appendChild(
      el(
        'span',
        { class: 'session-label' },
        `session ${this.state.sessionId} | baseline ${this.session.baseline.rankee_id} ` +
          `${this.session.baseline.year} | filters ${this.session.filter_log.length}`,
      ),
    );
    const undo = el('button', { class: 'undo-filter' }, 'undo filter');
    undo.addEventListener('click', () => void this.undoFilter());
    toolbar.appendChild(undo);
  }

  async toggleSelect(scenarioId: number): Promise<void> {
    const index = this.state.selected.indexOf(scenarioId);
    if (index >= 0) this.state.selected.splice(index, 1);
    else this.state.selected.push(scenarioId);
    if (this.page) {
      this.listView.render(this.page, this.session.spec, new Set(this.state.selected));
    }
    await this.refreshSummaries();
    await this.refreshSelectionViews();
    this.syncUrl();
  }

  async setSort(key: string): Promise<void> {
    if (this.state.sortKey === key) {
      this.state.sortDir = this.state.sortDir === 'asc' ? 'desc' : 'asc';
    } else {
      this.state.sortKey = key;
      this.state.sortDir = 'asc';
    }
    await this.refreshScenarios();
    this.syncUrl();
  }

  // Brushing a range on an analysis glyph appends a server-side filter;
  // the recorded filter log stays the single source of truth.
  async brushFilter(subject: string, low: number, high: number): Promise<void> {
    const expr = `${subject} mean between ${low.toFixed(6)}..${high.toFixed(6)}`;
    await this.api.appendFilter(this.state.sessionId, expr);
    this.session = await this.api.sessionInfo(this.state.sessionId);
    await this.refreshScenarios();
    await this.refreshSummaries();
    await this.refreshSelectionViews();
    this.renderToolbar();
    this.syncUrl();
  }

  async undoFilter(): Promise<void> {
    await this.api.undoFilter(this.state.sessionId);
    this.session = await this.api.sessionInfo(this.state.sessionId);
    await this.refreshScenarios();
    await this.refreshSummaries();
    await this.refreshSelectionViews();
    this.renderToolbar();
    this.syncUrl();
  }

  async setMethod(method: string): Promise<void> {
    this.state.method = method;
    await this.refreshSelectionViews();
    this.syncUrl();
  }

  async setHighlight(rival: string | null): Promise<void> {
    this.state.highlight = rival;
    await this.refreshSelectionViews();
    this.syncUrl();
  }

  private syncUrl(): void {
    this.onStateChange?.(encodeState(this.state));
  }
}
