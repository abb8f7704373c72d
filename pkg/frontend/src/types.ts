export type Sentiment = 'pos' | 'neg' | null;
export type Algorithm = 'dijkstra' | 'astar' | 'yen';

export interface PlaceInfo {
  id: string;
  name: string;
  address: string;
  review: string;
  lat: number;
  lon: number;
  sentiment: Sentiment;
}

export interface BoostWeights {
  w_length: number;
  w_sentiment: number;
  w_dist: number;
  w_pop: number;
  w_field: number;
  product: number;
}

export interface TermScore {
  term: string;
  tf: number;
  idf: number;
  norm: number;
  boost: BoostWeights | null;
}

export interface ScoreBreakdown {
  query_norm: number;
  coord: number;
  terms: TermScore[];
}

export interface SearchResult {
  place: PlaceInfo;
  score: number;
  distance_m: number | null;
  from_node: number | null;
  to_node: number | null;
  breakdown: ScoreBreakdown;
}

export interface SearchResponse {
  results: SearchResult[];
}

export interface RouteLeg {
  polyline: [number, number][];
  total_m: number;
}

export interface RouteResponse {
  routes: RouteLeg[];
  unreachable: boolean;
}
