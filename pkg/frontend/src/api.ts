import type { Algorithm, RouteResponse, SearchResponse } from './types.js';

export interface SearchOptions {
  algorithm?: Algorithm;
  boostsEnabled?: boolean;
  limit?: number;
  radiusM?: number;
  signal?: AbortSignal;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = `request failed with status ${response.status}`;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status message
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init)
  ) {}

  private url(path: string, params: Record<string, string | number | boolean | undefined>): string {
    const query = Object.entries(params)
      .filter(([, value]) => value !== undefined)
      .map(([key, value]) => `${encodeURIComponent(key)}=${encodeURIComponent(String(value))}`)
      .join('&');
    return `${this.baseUrl}${path}${query ? `?${query}` : ''}`;
  }

  search(
    q: string,
    lat: number,
    lon: number,
    options: SearchOptions = {}
  ): Promise<SearchResponse> {
    const url = this.url('/api/search', {
      q,
      lat,
      lon,
      algo: options.algorithm,
      boosts: options.boostsEnabled,
      limit: options.limit,
      radius_m: options.radiusM,
    });
    return this.fetchFn(url, { signal: options.signal }).then((r) => asJson<SearchResponse>(r));
  }

  route(
    fromLat: number,
    fromLon: number,
    placeId: string,
    algorithm?: Algorithm,
    k?: number,
    signal?: AbortSignal
  ): Promise<RouteResponse> {
    const url = this.url('/api/route', {
      from_lat: fromLat,
      from_lon: fromLon,
      place_id: placeId,
      algo: algorithm,
      k,
    });
    return this.fetchFn(url, { signal }).then((r) => asJson<RouteResponse>(r));
  }
}
