import { distanceLabel, sentimentLabel, weightLabel } from './format.js';
import type { UiState } from './state.js';
import type { BoostWeights, SearchResult, TermScore } from './types.js';

export interface Handlers {
  onSelect(placeId: string): void;
}

const WEIGHT_KEYS: [keyof BoostWeights, string][] = [
  ['w_length', 'match length'],
  ['w_sentiment', 'sentiment'],
  ['w_dist', 'distance'],
  ['w_pop', 'popularity'],
  ['w_field', 'field'],
];

function boostRows(term: TermScore): HTMLElement {
  const table = document.createElement('table');
  table.dataset['role'] = 'boost-breakdown';
  if (term.boost === null) {
    const row = table.insertRow();
    row.insertCell().textContent = 'boosts off';
    return table;
  }
  for (const [key, label] of WEIGHT_KEYS) {
    const row = table.insertRow();
    row.insertCell().textContent = label;
    const cell = row.insertCell();
    cell.textContent = weightLabel(term.boost[key]);
    cell.dataset['factor'] = key;
  }
  const productRow = table.insertRow();
  productRow.insertCell().textContent = 'product';
  productRow.insertCell().textContent = weightLabel(term.boost.product);
  return table;
}

function resultCard(result: SearchResult, handlers: Handlers, selected: boolean): HTMLElement {
  const card = document.createElement('li');
  card.dataset['role'] = 'result-card';
  card.dataset['placeId'] = result.place.id;
  if (selected) card.dataset['selected'] = 'true';

  const name = document.createElement('h3');
  name.textContent = result.place.name;
  card.appendChild(name);

  const badge = document.createElement('span');
  badge.dataset['role'] = 'sentiment-badge';
  badge.dataset['sentiment'] = result.place.sentiment ?? 'unknown';
  badge.textContent = sentimentLabel(result.place.sentiment);
  card.appendChild(badge);

  const distance = document.createElement('span');
  distance.dataset['role'] = 'result-distance';
  if (result.distance_m !== null) {
    distance.dataset['totalM'] = String(result.distance_m);
  }
  distance.textContent = distanceLabel(result.distance_m);
  card.appendChild(distance);

  const details = document.createElement('details');
  const summary = document.createElement('summary');
  summary.textContent = `score ${result.score.toPrecision(4)}`;
  details.appendChild(summary);
  for (const term of result.breakdown.terms) {
    const heading = document.createElement('p');
    heading.textContent = `term "${term.term}"`;
    details.appendChild(heading);
    details.appendChild(boostRows(term));
  }
  card.appendChild(details);

  const button = document.createElement('button');
  button.dataset['role'] = 'select-place';
  button.textContent = 'show route';
  button.addEventListener('click', () => handlers.onSelect(result.place.id));
  card.appendChild(button);
  return card;
}

/** Result cards in exactly the response order: the UI never re-ranks. */
export function renderResults(container: HTMLElement, state: UiState, handlers: Handlers): void {
  container.innerHTML = '';
  container.dataset['count'] = String(state.results.length);
  if (state.results.length === 0) {
    container.dataset['empty'] = 'true';
    return;
  }
  delete container.dataset['empty'];
  const list = document.createElement('ol');
  list.dataset['role'] = 'result-list';
  for (const result of state.results) {
    list.appendChild(resultCard(result, handlers, result.place.id === state.selectedPlaceId));
  }
  container.appendChild(list);
}

export function renderRoutePanel(container: HTMLElement, state: UiState): void {
  container.innerHTML = '';
  if (state.selectedPlaceId === null) {
    container.dataset['state'] = 'idle';
    return;
  }
  if (state.unreachable) {
    container.dataset['state'] = 'unreachable';
    const banner = document.createElement('p');
    banner.dataset['role'] = 'unreachable-banner';
    banner.textContent = 'unreachable';
    container.appendChild(banner);
    return;
  }
  if (state.routes.length === 0) {
    container.dataset['state'] = state.routeInFlight ? 'loading' : 'idle';
    return;
  }
  container.dataset['state'] = 'routed';
  const list = document.createElement('ul');
  list.dataset['role'] = 'route-list';
  state.routes.forEach((route, index) => {
    const item = document.createElement('li');
    item.dataset['role'] = 'route-leg';
    item.dataset['totalM'] = String(route.total_m);
    if (index === 0) item.dataset['shortest'] = 'true';
    item.textContent = distanceLabel(route.total_m);
    list.appendChild(item);
  });
  container.appendChild(list);
}

export function renderError(container: HTMLElement, state: UiState): void {
  container.textContent = state.error ?? '';
  container.dataset['visible'] = state.error ? 'true' : 'false';
}
