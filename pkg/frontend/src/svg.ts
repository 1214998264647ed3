/** Deterministic string-built SVG primitives shared by all plot kinds. */

export const WIDTH = 640;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 30, bottom: 56, left: 72 } as const;

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
];

/** Fixed-precision coordinate so output is byte-stable across runs. */
export function px(x: number): string {
  return x.toFixed(2);
}

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) =>
    r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  return scale;
}

export function polyline(
  points: Array<[number, number]>,
  stroke: string,
  extra = "",
): string {
  const path = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  return `<polyline fill="none" stroke="${stroke}" stroke-width="1.5" points="${path}"${extra}/>`;
}

export function circle(x: number, y: number, fill: string, r = 3): string {
  return `<circle cx="${px(x)}" cy="${px(y)}" r="${r}" fill="${fill}"/>`;
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  fill: string,
): string {
  return `<rect x="${px(x)}" y="${px(y)}" width="${px(w)}" height="${px(h)}" fill="${fill}"/>`;
}

export function line(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  stroke: string,
  extra = "",
): string {
  return `<line x1="${px(x1)}" y1="${px(y1)}" x2="${px(x2)}" y2="${px(y2)}" stroke="${stroke}"${extra}/>`;
}

export function text(
  x: number,
  y: number,
  content: string,
  anchor: "start" | "middle" | "end" = "start",
  size = 12,
): string {
  return (
    `<text x="${px(x)}" y="${px(y)}" text-anchor="${anchor}" ` +
    `font-family="sans-serif" font-size="${size}">${escapeXml(content)}</text>`
  );
}

export function escapeXml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;");
}

/** Axis frame plus titles; callers append data marks before closing. */
export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    "</svg>",
  ].join("\n");
}

export function axes(xLabel: string, yLabel: string, title: string): string[] {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  return [
    line(x0, y0, x1, y0, "black"),
    line(x0, y0, x0, y1, "black"),
    text((x0 + x1) / 2, HEIGHT - 12, xLabel, "middle"),
    `<g transform="rotate(-90 18 ${px((y0 + y1) / 2)})">` +
      text(18, (y0 + y1) / 2, yLabel, "middle") +
      "</g>",
    text((x0 + x1) / 2, 22, title, "middle", 14),
  ];
}

/** Ticks at integer powers of ten inside a log10 domain. */
export function log10Ticks(domain: [number, number]): number[] {
  const ticks: number[] = [];
  for (
    let k = Math.ceil(domain[0] - 1e-9);
    k <= Math.floor(domain[1] + 1e-9);
    k += 1
  ) {
    ticks.push(k);
  }
  return ticks;
}

export function powerLabel(log10Value: number): string {
  return `1e${log10Value}`;
}
