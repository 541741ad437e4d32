// View state is fully serializable to the URL query string so any view
// configuration is shareable: load(encode(state)) reproduces the same
// rendered selections.

export interface ViewState {
  sessionId: string;
  selected: number[];
  sortKey: string | null;
  sortDir: 'asc' | 'desc';
  method: string;
  highlight: string | null;
  focusIndicator: string | null;
  page: number;
}

export function defaultState(sessionId: string): ViewState {
  return {
    sessionId,
    selected: [],
    sortKey: null,
    sortDir: 'asc',
    method: 'carry_forward',
    highlight: null,
    focusIndicator: null,
    page: 1,
  };
}

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set('session', state.sessionId);
  if (state.selected.length) params.set('sel', state.selected.join(','));
  if (state.sortKey) {
    params.set('sort', state.sortKey);
    params.set('dir', state.sortDir);
  }
  params.set('method', state.method);
  if (state.highlight) params.set('rival', state.highlight);
  if (state.focusIndicator) params.set('focus', state.focusIndicator);
  if (state.page !== 1) params.set('page', String(state.page));
  return params.toString();
}

export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = defaultState(params.get('session') ?? '');
  const selected = params.get('sel');
  if (selected) {
    state.selected = selected
      .split(',')
      .map((token) => Number.parseInt(token, 10))
      .filter((id) => Number.isFinite(id));
  }
  const sort = params.get('sort');
  if (sort) {
    state.sortKey = sort;
    state.sortDir = params.get('dir') === 'desc' ? 'desc' : 'asc';
  }
  state.method = params.get('method') ?? state.method;
  state.highlight = params.get('rival');
  state.focusIndicator = params.get('focus');
  state.page = Number.parseInt(params.get('page') ?? '1', 10) || 1;
  return state;
}
