import type { RouteLeg, SearchResult } from './types.js';

export interface SchematicGraph {
  nodes: Map<number, [number, number]>;
  edges: [number, number][];
}

/** Parse the road-graph file format: a "nodes:" section of "id lat lon"
 * lines and an "edges:" section of "u v length_m [directed]" lines. */
export function parseGraph(text: string): SchematicGraph {
  const nodes = new Map<number, [number, number]>();
  const edges: [number, number][] = [];
  let section: 'nodes' | 'edges' | null = null;
  for (const raw of text.split('\n')) {
    const line = raw.split('#', 1)[0]!.trim();
    if (!line) continue;
    if (line === 'nodes:') {
      section = 'nodes';
      continue;
    }
    if (line === 'edges:') {
      section = 'edges';
      continue;
    }
    const parts = line.split(/\s+/);
    if (section === 'nodes' && parts.length === 3) {
      nodes.set(Number(parts[0]), [Number(parts[1]), Number(parts[2])]);
    } else if (section === 'edges' && parts.length >= 3) {
      edges.push([Number(parts[0]), Number(parts[1])]);
    }
  }
  return { nodes, edges };
}

interface Bounds {
  minLat: number;
  maxLat: number;
  minLon: number;
  maxLon: number;
}

function boundsOf(points: Iterable<[number, number]>): Bounds | null {
  let bounds: Bounds | null = null;
  for (const [lat, lon] of points) {
    if (bounds === null) {
      bounds = { minLat: lat, maxLat: lat, minLon: lon, maxLon: lon };
    } else {
      bounds.minLat = Math.min(bounds.minLat, lat);
      bounds.maxLat = Math.max(bounds.maxLat, lat);
      bounds.minLon = Math.min(bounds.minLon, lon);
      bounds.maxLon = Math.max(bounds.maxLon, lon);
    }
  }
  return bounds;
}

function projector(bounds: Bounds, width: number, height: number) {
  const pad = 12;
  const latSpan = Math.max(bounds.maxLat - bounds.minLat, 1e-9);
  const lonSpan = Math.max(bounds.maxLon - bounds.minLon, 1e-9);
  return (lat: number, lon: number): [number, number] => [
    pad + ((lon - bounds.minLon) / lonSpan) * (width - 2 * pad),
    height - pad - ((lat - bounds.minLat) / latSpan) * (height - 2 * pad),
  ];
}

/**
 * Schematic map: graph edges in gray, result places as dots, route
 * polylines on top with the shortest highlighted. No tile dependency; in
 * DOM environments without a 2d context only the data attributes update.
 */
export function drawMap(
  canvas: HTMLCanvasElement,
  graph: SchematicGraph | null,
  routes: RouteLeg[],
  results: SearchResult[]
): void {
  canvas.dataset['routes'] = String(routes.length);
  canvas.dataset['places'] = String(results.length);
  canvas.dataset['graphNodes'] = String(graph ? graph.nodes.size : 0);

  const points: [number, number][] = [];
  if (graph) points.push(...graph.nodes.values());
  for (const route of routes) points.push(...route.polyline);
  for (const result of results) points.push([result.place.lat, result.place.lon]);
  const bounds = boundsOf(points);
  const context = canvas.getContext ? canvas.getContext('2d') : null;
  if (!context || !bounds) return;

  const project = projector(bounds, canvas.width, canvas.height);
  context.clearRect(0, 0, canvas.width, canvas.height);

  if (graph) {
    context.strokeStyle = '#c8c8c8';
    context.lineWidth = 1;
    for (const [u, v] of graph.edges) {
      const a = graph.nodes.get(u);
      const b = graph.nodes.get(v);
      if (!a || !b) continue;
      context.beginPath();
      context.moveTo(...project(a[0], a[1]));
      context.lineTo(...project(b[0], b[1]));
      context.stroke();
    }
  }

  context.fillStyle = '#2266aa';
  for (const result of results) {
    const [x, y] = project(result.place.lat, result.place.lon);
    context.beginPath();
    context.arc(x, y, 3, 0, 2 * Math.PI);
    context.fill();
  }

  routes.forEach((route, index) => {
    context.strokeStyle = index === 0 ? '#d03030' : '#e09090';
    context.lineWidth = index === 0 ? 3 : 1.5;
    context.beginPath();
    route.polyline.forEach(([lat, lon], pointIndex) => {
      const [x, y] = project(lat, lon);
      if (pointIndex === 0) context.moveTo(x, y);
      else context.lineTo(x, y);
    });
    context.stroke();
  });
}
