import type { Sentiment } from './types.js';

// The displayed distance embeds the API's total_m verbatim: no rounding,
// no unit conversion, so the UI can never disagree with the service.
export function distanceLabel(totalM: number | null): string {
  return totalM === null ? 'no route' : `${totalM} m`;
}

export function sentimentLabel(sentiment: Sentiment): string {
  if (sentiment === 'pos') return 'positive';
  if (sentiment === 'neg') return 'negative';
  return 'unrated';
}

export function weightLabel(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}
