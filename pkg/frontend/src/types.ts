export type Metrics = {
  objective_ratio: number;
  test_hinge: number | null;
  misclass: number | null;
  dp: number | null;
  test_loss_ratio: number | null;
};

export type SolutionJson = {
  I: number[];
  support: number[];
  alpha: Record<string, number>;
  objective: number;
  bias: number;
};

export type ModelRecord = {
  rank: number;
  objective: number;
  objective_ratio: number;
  support: number[];
  support_size: number;
  bias: number;
  solution: SolutionJson;
  provenance: { index_set: number[]; parent_rank: number | null };
  metrics: Metrics | null;
};

export type DatasetInfo = {
  dataset_id: string;
  name: string | null;
  n: number;
  d: number;
  feature_names: string[] | null;
};

export type SessionInfo = {
  session_id: string;
  config: Record<string, unknown>;
  models_emitted: number;
  exhausted: boolean;
  stats: Record<string, number>;
};

export type SortKey = 'rank' | 'objective' | 'objective_ratio' | 'test_hinge' | 'misclass' | 'dp';

export type ApiError = { code: string; message: string };
