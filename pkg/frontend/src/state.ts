import type { ModelRecord, SortKey } from './types';

/** Console state for one open session tab. */
export type ConsoleState = {
  sessionId: string | null;
  cards: ModelRecord[]; // arrival order = rank order
  exhausted: boolean;
  sortKey: SortKey;
  sortAscending: boolean;
  compare: number[]; // ranks picked for the comparison panel (max 2)
  selection: number[]; // ranks persisted via /selection
  fetching: boolean;
};

export const initialState = (): ConsoleState => ({
  sessionId: null,
  cards: [],
  exhausted: false,
  sortKey: 'rank',
  sortAscending: true,
  compare: [],
  selection: [],
  fetching: false,
});

const metricValue = (m: ModelRecord, key: SortKey): number => {
  switch (key) {
    case 'rank':
      return m.rank;
    case 'objective':
      return m.objective;
    case 'objective_ratio':
      return m.objective_ratio;
    case 'test_hinge':
      return m.metrics?.test_hinge ?? Number.POSITIVE_INFINITY;
    case 'misclass':
      return m.metrics?.misclass ?? Number.POSITIVE_INFINITY;
    case 'dp':
      return m.metrics?.dp ?? Number.POSITIVE_INFINITY;
  }
};

/** Cards in display order; rank labels travel with their cards untouched. */
export const sortedCards = (state: ConsoleState): ModelRecord[] => {
  const out = [...state.cards];
  out.sort((a, b) => {
    const va = metricValue(a, state.sortKey);
    const vb = metricValue(b, state.sortKey);
    if (va !== vb) return state.sortAscending ? va - vb : vb - va;
    return a.rank - b.rank;
  });
  return out;
};

export type SupportDiff = {
  onlyA: number[];
  onlyB: number[];
  shared: number[];
};

export const supportDiff = (a: ModelRecord, b: ModelRecord): SupportDiff => {
  const sa = new Set(a.support);
  const sb = new Set(b.support);
  return {
    onlyA: a.support.filter((j) => !sb.has(j)),
    onlyB: b.support.filter((j) => !sa.has(j)),
    shared: a.support.filter((j) => sb.has(j)),
  };
};

/** Difference of two verbatim API fields, for the delta badges. */
export const deltaVsRank1 = (
  state: ConsoleState,
  card: ModelRecord,
  key: 'test_hinge' | 'misclass' | 'dp',
): number | null => {
  const first = state.cards.find((c) => c.rank === 1);
  const base = first?.metrics?.[key];
  const value = card.metrics?.[key];
  if (base == null || value == null) return null;
  return value - base;
};

export const toggleCompare = (state: ConsoleState, rank: number): void => {
  if (state.compare.includes(rank)) {
    state.compare = state.compare.filter((r) => r !== rank);
  } else {
    state.compare = [...state.compare, rank].slice(-2);
  }
};

export const toggleSelection = (state: ConsoleState, rank: number): void => {
  if (state.selection.includes(rank)) {
    state.selection = state.selection.filter((r) => r !== rank);
  } else {
    state.selection = [...state.selection, rank].sort((x, y) => x - y);
  }
};
