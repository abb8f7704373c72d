import { ApiClient } from './api.js';
import { drawMap, parseGraph, SchematicGraph } from './map.js';
import { renderError, renderResults, renderRoutePanel } from './render.js';
import { AppStore } from './state.js';
import type { Algorithm } from './types.js';

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) throw new Error(`missing #${id}`);
  return element as T;
}

export function bootstrap(): AppStore {
  const params = new URLSearchParams(window.location.search);
  const apiBase = params.get('api') ?? 'http://localhost:8000';
  const store = new AppStore(new ApiClient(apiBase));

  const queryInput = byId<HTMLInputElement>('query');
  const latInput = byId<HTMLInputElement>('lat');
  const lonInput = byId<HTMLInputElement>('lon');
  const algoSelect = byId<HTMLSelectElement>('algorithm');
  const boostsToggle = byId<HTMLInputElement>('boosts');
  const searchButton = byId<HTMLButtonElement>('search');
  const locateButton = byId<HTMLButtonElement>('locate');
  const resultsPane = byId<HTMLElement>('results');
  const routePane = byId<HTMLElement>('route');
  const errorPane = byId<HTMLElement>('error');
  const canvas = byId<HTMLCanvasElement>('map');

  let graph: SchematicGraph | null = null;
  const graphUrl = params.get('graph');
  if (graphUrl) {
    fetch(graphUrl)
      .then((r) => r.text())
      .then((text) => {
        graph = parseGraph(text);
        drawMap(canvas, graph, store.state.routes, store.state.results);
      })
      .catch(() => {
        graph = null; // schematic map still renders routes and places
      });
  }

  queryInput.addEventListener('input', () => store.setQuery(queryInput.value));
  latInput.addEventListener('change', () =>
    store.setPosition(Number(latInput.value), Number(lonInput.value))
  );
  lonInput.addEventListener('change', () =>
    store.setPosition(Number(latInput.value), Number(lonInput.value))
  );
  algoSelect.addEventListener('change', () => {
    void store.setAlgorithm(algoSelect.value as Algorithm);
  });
  boostsToggle.addEventListener('change', () => store.setBoosts(boostsToggle.checked));
  searchButton.addEventListener('click', () => void store.runSearch());
  locateButton.addEventListener('click', () => {
    if (!navigator.geolocation) return;
    navigator.geolocation.getCurrentPosition((position) => {
      latInput.value = String(position.coords.latitude);
      lonInput.value = String(position.coords.longitude);
      store.setPosition(position.coords.latitude, position.coords.longitude);
    });
  });

  store.subscribe((state) => {
    renderResults(resultsPane, state, {
      onSelect: (placeId) => void store.selectPlace(placeId),
    });
    renderRoutePanel(routePane, state);
    renderError(errorPane, state);
    drawMap(canvas, graph, state.routes, state.results);
  });
  return store;
}

if (typeof document !== 'undefined' && document.getElementById('query')) {
  bootstrap();
}
