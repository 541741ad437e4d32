import { describe, expect, it } from 'vitest';

import { decodeState, defaultState, encodeState, ViewState } from '../src/state';

describe('view state URL serialization', () => {
  it('round-trips a fully populated state', () => {
    const state: ViewState = {
      sessionId: 'abc123',
      selected: [4, 0, 7],
      sortKey: 'final',
      sortDir: 'desc',
      method: 'trend_extrapolation',
      highlight: 'R02',
      focusIndicator: 'capacity',
      page: 3,
    };
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it('round-trips the default state', () => {
    const state = defaultState('s1');
    expect(decodeState(encodeState(state))).toEqual(state);
  });

  it('ignores garbage selection tokens', () => {
    const state = decodeState('session=s1&sel=3,x,9');
    expect(state.selected).toEqual([3, 9]);
  });

  it('defaults direction to asc unless explicitly desc', () => {
    expect(decodeState('session=s1&sort=final').sortDir).toBe('asc');
    expect(decodeState('session=s1&sort=final&dir=desc').sortDir).toBe('desc');
  });
});
