import { ApiClient } from './api.js';
import type { Algorithm, RouteLeg, SearchResult } from './types.js';

export interface UiState {
  query: string;
  lat: number;
  lon: number;
  algorithm: Algorithm;
  boostsEnabled: boolean;
  results: SearchResult[];
  selectedPlaceId: string | null;
  routes: RouteLeg[];
  unreachable: boolean;
  error: string | null;
  searchInFlight: boolean;
  routeInFlight: boolean;
}

export type Listener = (state: UiState) => void;

function isAbort(error: unknown): boolean {
  return error instanceof DOMException && error.name === 'AbortError';
}

/**
 * Single-owner UI state. At most one search and one route request are in
 * flight; starting a new one aborts the old (newest wins). The selected
 * place is always a member of the current results, and a route is shown
 * only for the selected place.
 */
export class AppStore {
  state: UiState = {
    query: '',
    lat: 52.0,
    lon: 5.0,
    algorithm: 'dijkstra',
    boostsEnabled: true,
    results: [],
    selectedPlaceId: null,
    routes: [],
    unreachable: false,
    error: null,
    searchInFlight: false,
    routeInFlight: false,
  };

  private listeners: Listener[] = [];
  private searchController: AbortController | null = null;
  private routeController: AbortController | null = null;

  constructor(private api: ApiClient, private yenK = 3) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private patch(partial: Partial<UiState>): void {
    this.state = { ...this.state, ...partial };
    this.emit();
  }

  setQuery(query: string): void {
    this.patch({ query });
  }

  setPosition(lat: number, lon: number): void {
    this.patch({ lat, lon });
  }

  setBoosts(enabled: boolean): void {
    this.patch({ boostsEnabled: enabled });
  }

  /** Algorithm switches re-request the route for the current selection. */
  async setAlgorithm(algorithm: Algorithm): Promise<void> {
    this.patch({ algorithm });
    if (this.state.selectedPlaceId !== null) {
      await this.selectPlace(this.state.selectedPlaceId);
    }
  }

  async runSearch(): Promise<void> {
    if (!this.state.query.trim()) {
      this.patch({ error: 'enter a query first' });
      return;
    }
    this.searchController?.abort();
    const controller = new AbortController();
    this.searchController = controller;
    this.patch({ error: null, searchInFlight: true });
    try {
      const response = await this.api.search(this.state.query, this.state.lat, this.state.lon, {
        algorithm: this.state.algorithm,
        boostsEnabled: this.state.boostsEnabled,
        signal: controller.signal,
      });
      if (controller !== this.searchController) return; // superseded
      const results = response.results;
      const stillThere = results.some((r) => r.place.id === this.state.selectedPlaceId);
      this.patch({
        results,
        searchInFlight: false,
        selectedPlaceId: stillThere ? this.state.selectedPlaceId : null,
        routes: stillThere ? this.state.routes : [],
        unreachable: false,
      });
    } catch (error) {
      if (isAbort(error)) return;
      if (controller !== this.searchController) return;
      this.patch({ searchInFlight: false, error: String(error) });
    }
  }

  async selectPlace(placeId: string): Promise<void> {
    if (!this.state.results.some((r) => r.place.id === placeId)) {
      this.patch({ error: `place ${placeId} is not in the current results` });
      return;
    }
    this.routeController?.abort();
    const controller = new AbortController();
    this.routeController = controller;
    this.patch({ selectedPlaceId: placeId, routeInFlight: true, error: null });
    try {
      const response = await this.api.route(
        this.state.lat,
        this.state.lon,
        placeId,
        this.state.algorithm,
        this.state.algorithm === 'yen' ? this.yenK : undefined,
        controller.signal
      );
      if (controller !== this.routeController) return;
      this.patch({
        routes: response.routes,
        unreachable: response.unreachable,
        routeInFlight: false,
      });
    } catch (error) {
      if (isAbort(error)) return;
      if (controller !== this.routeController) return;
      this.patch({ routeInFlight: false, error: String(error) });
    }
  }
}
