// Payload types mirroring the realign HTTP API.

export type NestedStructure = string[][][]; // conferences -> divisions -> team ids

export interface LeagueSummary {
  id: string;
  team_count: number;
  default_template: string;
  templates: string[];
}

export interface TeamRecord {
  id: string;
  name: string;
  city: string;
  lat: number;
  lon: number;
  country: string;
  tz_offset: number;
}

export interface LeagueDetail extends LeagueSummary {
  dataset: {
    league_id: string;
    teams: TeamRecord[];
    current_structure?: NestedStructure;
  };
}

export interface GeoJsonFeature {
  type: "Feature";
  geometry: {
    type: "Point" | "LineString" | "Polygon";
    coordinates: unknown;
  };
  properties: Record<string, unknown>;
}

export interface GeoJsonCollection {
  type: "FeatureCollection";
  features: GeoJsonFeature[];
}

export interface SolveResultItem {
  rank: number;
  D: number;
  miles_over_best: number;
  structure: NestedStructure;
  geojson?: GeoJsonCollection;
}

export interface SolveResponse {
  dataset: string;
  template: string;
  total: number;
  page: number;
  page_size: number;
  best_D: number;
  stats: Record<string, unknown>;
  summary: { label: string; D: number; miles_over_minimum: number }[];
  results: SolveResultItem[];
}

export interface DiffRow {
  team_id: string;
  current: number;
  alternative: number;
  delta: number;
  direction: "better" | "worse" | "same";
}

export interface DiffResponse {
  dataset: string;
  teams: DiffRow[];
  totals: { current: number; alternative: number; delta: number };
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}

export type PredicateKind =
  | "together"
  | "apart"
  | "max_attr_per_division"
  | "max_tz_span_per_division"
  | "fixed_group";

export interface PredicatePayload {
  kind: PredicateKind;
  params: Record<string, unknown>;
}

export type PredicateSpec = PredicatePayload | string; // string = preset name

export interface MoveEditSpec {
  move: { team: string; to: string | Record<string, unknown> };
}

export interface AddEditSpec {
  add: { id: string; name?: string; to: string | Record<string, unknown> };
}

export type EditSpec = MoveEditSpec | AddEditSpec;

// The relocation/expansion cities the scenario panel offers; coordinates
// match the service's bundled gazetteer.
export const GAZETTEER: Record<
  string,
  { city: string; country: string; tz_offset: number }
> = {
  "quebec-city": { city: "Quebec City", country: "CA", tz_offset: -5 },
  seattle: { city: "Seattle", country: "US", tz_offset: -8 },
  "kansas-city": { city: "Kansas City", country: "US", tz_offset: -6 },
  houston: { city: "Houston", country: "US", tz_offset: -6 },
  "las-vegas": { city: "Las Vegas", country: "US", tz_offset: -8 },
  hamilton: { city: "Hamilton", country: "CA", tz_offset: -5 },
};
