// Payload shapes of the rankforge session API. The UI renders these
// verbatim: every number on screen comes out of one of these documents,
// the client only maps values to pixels and colors.

export interface ApiError {
  code: string;
  message: string;
  location?: string;
}

export interface Envelope<T> {
  status: 'ok' | 'error';
  payload?: T;
  error?: ApiError;
}

export interface AttributeDoc {
  id: string;
  name: string;
  unit: string;
  domain: [number, number];
}

export interface IndicatorDoc {
  id: string;
  name: string;
  weight: number;
  group: string[];
}

export interface SpecDoc {
  attributes: AttributeDoc[];
  indicators: IndicatorDoc[];
  score_bounds: [number, number];
}

export interface BaselineDoc {
  rankee_id: string;
  year: number;
  attribute_values: Record<string, number>;
  indicator_scores: Record<string, number>;
  final_score: number;
  rank: number;
}

export interface SessionInfo {
  session_id: string;
  created_at: string;
  spec: SpecDoc;
  baseline: BaselineDoc;
  ranges: { attribute_id: string; values: number[] }[];
  rivals: string[];
  methods: string[];
  filter_log: unknown[][];
  scenario_count: number;
  filtered_count: number;
}

export interface ScoreCell {
  mean: number;
  min: number;
  max: number;
  mean_delta: number;
  band: [number, number];
}

export interface ScenarioRow {
  scenario_id: number;
  attributes: Record<string, { value: number; delta: number }>;
  indicators: Record<string, ScoreCell>;
  final: ScoreCell;
  modal_rank: number;
  rank_distribution: Record<string, number>;
}

export interface ScenarioPage {
  total: number;
  page: number;
  page_size: number;
  scenarios: ScenarioRow[];
}

export interface SummaryDoc {
  subject: string;
  bin_edges: number[];
  frequencies: number[];
  uncertainty_band: [number, number];
  count: number;
}

export interface InfluenceEntryDoc {
  raw: number;
  normalized: number;
  flag: string | null;
}

export interface InfluenceDoc {
  selection_id: string;
  normalization_factor: number;
  scenario_ids: number[];
  indicators: string[];
  attributes: string[];
  entries: Record<string, Record<string, Record<string, InfluenceEntryDoc>>>;
}

export interface HeatmapCell {
  rival_id: string;
  method_id: string;
  subject: string;
  probability: number | null;
  flag: string | null;
}

export interface HeatmapDoc {
  scenario_id: number;
  rivals: string[];
  methods: string[];
  subjects: string[];
  cells: HeatmapCell[];
}

export interface DistributionDoc {
  subject: string;
  bin_edges: number[];
  density: number[];
  expected: number;
}

export interface RadarSubjectDoc {
  ours: DistributionDoc;
  rival_expected: Record<string, number>;
  highlighted: DistributionDoc | null;
}

export interface RadarDoc {
  scenario_id: number;
  method: string;
  subjects: Record<string, RadarSubjectDoc>;
}

export interface FilterResult {
  filters: number;
  scenario_count: number;
}

export interface CreatedSession {
  session_id: string;
  scenario_count: number;
}
