// SVG hull map: one colored polygon per division, conference encoded by
// hue family, team markers on top. Falls back to a plain list when the
// payload is malformed.

import type { GeoJsonCollection, GeoJsonFeature } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 900;
const HEIGHT = 560;

// hue families per conference; divisions shade within the family
const CONFERENCE_HUES = [210, 10, 130, 40];

export function divisionColor(conference: number, division: number): string {
  const hue = CONFERENCE_HUES[conference % CONFERENCE_HUES.length]!;
  const lightness = 42 + division * 9;
  return `hsl(${hue}, 70%, ${lightness}%)`;
}

interface Bounds {
  minLon: number;
  maxLon: number;
  minLat: number;
  maxLat: number;
}

function collectBounds(features: GeoJsonFeature[]): Bounds | null {
  let minLon = Infinity;
  let maxLon = -Infinity;
  let minLat = Infinity;
  let maxLat = -Infinity;
  for (const feature of features) {
    for (const [lon, lat] of iterCoordinates(feature)) {
      minLon = Math.min(minLon, lon);
      maxLon = Math.max(maxLon, lon);
      minLat = Math.min(minLat, lat);
      maxLat = Math.max(maxLat, lat);
    }
  }
  if (!Number.isFinite(minLon)) return null;
  return { minLon, maxLon, minLat, maxLat };
}

function* iterCoordinates(feature: GeoJsonFeature): Generator<[number, number]> {
  const geom = feature.geometry;
  if (geom.type === "Point") {
    yield geom.coordinates as [number, number];
  } else if (geom.type === "LineString") {
    yield* geom.coordinates as [number, number][];
  } else if (geom.type === "Polygon") {
    for (const ring of geom.coordinates as [number, number][][]) {
      yield* ring;
    }
  }
}

function projector(bounds: Bounds): (lon: number, lat: number) => [number, number] {
  const pad = 24;
  const lonSpan = Math.max(bounds.maxLon - bounds.minLon, 1e-9);
  const latSpan = Math.max(bounds.maxLat - bounds.minLat, 1e-9);
  const scale = Math.min(
    (WIDTH - 2 * pad) / lonSpan,
    (HEIGHT - 2 * pad) / latSpan,
  );
  return (lon, lat) => [
    pad + (lon - bounds.minLon) * scale,
    HEIGHT - pad - (lat - bounds.minLat) * scale,
  ];
}

function isValidCollection(payload: unknown): payload is GeoJsonCollection {
  const collection = payload as GeoJsonCollection;
  return (
    !!collection &&
    collection.type === "FeatureCollection" &&
    Array.isArray(collection.features) &&
    collection.features.every(
      (f) => f && f.type === "Feature" && !!f.geometry && !!f.properties,
    )
  );
}

/** Render the hull map into `container`; returns the mode used. */
export function renderMap(
  container: HTMLElement,
  payload: unknown,
): "map" | "list" | "empty" {
  container.textContent = "";
  if (payload == null) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No structure to display. Run a solve to see the map.";
    container.appendChild(empty);
    return "empty";
  }
  if (!isValidCollection(payload)) {
    return renderFallbackList(container, payload);
  }

  const bounds = collectBounds(payload.features);
  if (!bounds) {
    return renderFallbackList(container, payload);
  }
  const toXY = projector(bounds);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "hull-map");

  const hulls = payload.features.filter(
    (f) => f.properties.kind === "division-hull",
  );
  for (const feature of hulls) {
    const conference = Number(feature.properties.conference ?? 0);
    const division = Number(feature.properties.division ?? 0);
    const color = divisionColor(conference, division);
    const points = [...iterCoordinates(feature)].map(([lon, lat]) =>
      toXY(lon, lat).join(","),
    );
    const geomType = feature.geometry.type;
    let node: Element;
    if (geomType === "Point") {
      const [x, y] = toXY(...(feature.geometry.coordinates as [number, number]));
      node = document.createElementNS(SVG_NS, "circle");
      node.setAttribute("cx", String(x));
      node.setAttribute("cy", String(y));
      node.setAttribute("r", "10");
      node.setAttribute("fill", "none");
    } else if (geomType === "LineString") {
      node = document.createElementNS(SVG_NS, "polyline");
      node.setAttribute("points", points.join(" "));
      node.setAttribute("fill", "none");
    } else {
      node = document.createElementNS(SVG_NS, "polygon");
      node.setAttribute("points", points.join(" "));
      node.setAttribute("fill", color);
      node.setAttribute("fill-opacity", "0.25");
    }
    node.setAttribute("stroke", color);
    node.setAttribute("stroke-width", "2");
    node.setAttribute("class", "division-hull");
    node.setAttribute("data-conference", String(conference));
    node.setAttribute("data-division", String(division));
    node.setAttribute(
      "data-teams",
      ((feature.properties.teams as string[]) ?? []).join(" "),
    );
    svg.appendChild(node);
  }

  for (const feature of payload.features) {
    if (feature.properties.kind !== "team") continue;
    const [x, y] = toXY(...(feature.geometry.coordinates as [number, number]));
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x));
    dot.setAttribute("cy", String(y));
    dot.setAttribute("r", "3.5");
    dot.setAttribute("class", "team-marker");
    dot.setAttribute("data-team", String(feature.properties.team_id));
    svg.appendChild(dot);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(x + 5));
    label.setAttribute("y", String(y - 4));
    label.setAttribute("class", "team-label");
    label.textContent = String(feature.properties.team_id);
    svg.appendChild(label);
  }

  container.appendChild(svg);
  return "map";
}

function renderFallbackList(container: HTMLElement, payload: unknown): "list" {
  const note = document.createElement("p");
  note.className = "map-fallback";
  note.textContent = "Map payload was malformed; showing raw feature list.";
  container.appendChild(note);
  const list = document.createElement("ul");
  const features = Array.isArray((payload as GeoJsonCollection)?.features)
    ? (payload as GeoJsonCollection).features
    : [];
  for (const feature of features) {
    const item = document.createElement("li");
    item.textContent = JSON.stringify(feature?.properties ?? feature);
    list.appendChild(item);
  }
  if (!features.length) {
    const item = document.createElement("li");
    item.textContent = String(payload);
    list.appendChild(item);
  }
  container.appendChild(list);
  return "list";
}
