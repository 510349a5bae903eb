// Dashboard shaping. Numbers come straight from the stats endpoint; this
// module only arranges them for display and draws two small SVG charts.

import type { PhaseStats } from "./types.js";

export interface Series {
  label: string;
  value: number;
}

export function distributionSeries(row: PhaseStats, category: string): Series[] {
  const dist = row.distributions[category] ?? {};
  return Object.entries(dist).map(([label, value]) => ({ label, value }));
}

export function criterionSeries(row: PhaseStats): Series[] {
  return Object.entries(row.per_criterion).map(([label, value]) => ({ label, value }));
}

const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#59a14f",
  "#e15759",
  "#b07aa1",
  "#76b7b2",
  "#edc948",
  "#9c755f",
];

export function color(index: number): string {
  return PALETTE[index % PALETTE.length];
}

/** Horizontal bar chart; bar lengths are proportional to the series max. */
export function barChartSvg(series: Series[], width = 360, barHeight = 18): string {
  if (!series.length) return `<svg width="${width}" height="8"></svg>`;
  const max = Math.max(...series.map((s) => s.value), 1);
  const gap = 6;
  const labelWidth = 120;
  const height = series.length * (barHeight + gap);
  const rows = series.map((s, i) => {
    const y = i * (barHeight + gap);
    const w = ((width - labelWidth - 40) * s.value) / max;
    return (
      `<text x="${labelWidth - 6}" y="${y + barHeight - 5}" text-anchor="end" class="chart-label">${escapeXml(s.label)}</text>` +
      `<rect x="${labelWidth}" y="${y}" width="${Math.max(w, 1)}" height="${barHeight}" fill="${color(i)}"></rect>` +
      `<text x="${labelWidth + Math.max(w, 1) + 4}" y="${y + barHeight - 5}" class="chart-value">${s.value}</text>`
    );
  });
  return `<svg width="${width}" height="${height}" role="img">${rows.join("")}</svg>`;
}

/** Pie chart from the same series; slices in series order. */
export function pieChartSvg(series: Series[], size = 160): string {
  const total = series.reduce((acc, s) => acc + s.value, 0);
  if (!total) return `<svg width="${size}" height="${size}"></svg>`;
  const r = size / 2;
  const cx = r;
  const cy = r;
  let angle = -Math.PI / 2;
  const slices = series.map((s, i) => {
    const span = (s.value / total) * 2 * Math.PI;
    const x1 = cx + r * Math.cos(angle);
    const y1 = cy + r * Math.sin(angle);
    angle += span;
    const x2 = cx + r * Math.cos(angle);
    const y2 = cy + r * Math.sin(angle);
    if (series.length === 1 || span >= 2 * Math.PI - 1e-9) {
      return `<circle cx="${cx}" cy="${cy}" r="${r}" fill="${color(i)}"><title>${escapeXml(s.label)}: ${s.value}</title></circle>`;
    }
    const large = span > Math.PI ? 1 : 0;
    const d = `M ${cx} ${cy} L ${x1} ${y1} A ${r} ${r} 0 ${large} 1 ${x2} ${y2} Z`;
    return `<path d="${d}" fill="${color(i)}"><title>${escapeXml(s.label)}: ${s.value}</title></path>`;
  });
  return `<svg width="${size}" height="${size}" viewBox="0 0 ${size} ${size}" role="img">${slices.join("")}</svg>`;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
