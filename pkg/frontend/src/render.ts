// Tiny DOM/SVG construction helpers plus the two color scales. All pixel
// math in the views is plain linear mapping of served values.

const SVG_NS = 'http://www.w3.org/2000/svg';

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') node.className = value;
    else node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export interface LinearScale {
  (value: number): number;
  invert(pixel: number): number;
}

export function linearScale(
  domainLo: number,
  domainHi: number,
  rangeLo: number,
  rangeHi: number,
): LinearScale {
  const span = domainHi - domainLo || 1;
  const scale = ((value: number) =>
    rangeLo + ((value - domainLo) / span) * (rangeHi - rangeLo)) as LinearScale;
  scale.invert = (pixel: number) =>
    domainLo + ((pixel - rangeLo) / (rangeHi - rangeLo || 1)) * span;
  return scale;
}

// Diverging red <-> green scale with endpoints pinned at normalized -1/+1,
// matching the per-selection normalization of the influence matrix.
export function divergingShade(normalized: number): string {
  const t = Math.max(-1, Math.min(1, normalized));
  const strength = Math.round(Math.abs(t) * 160);
  if (t >= 0) return `rgb(${230 - strength}, 230, ${230 - strength})`;
  return `rgb(230, ${230 - strength}, ${230 - strength})`;
}

// 0 -> rival-favored red, 0.5 -> neutral white, 1 -> user-favored green.
export function probabilityColor(p: number): string {
  return divergingShade((p - 0.5) * 2);
}

// Distinct colors for overlaid per-scenario uncertainty bars.
export const SELECTION_PALETTE = [
  '#1f77b4',
  '#ff7f0e',
  '#2ca02c',
  '#d62728',
  '#9467bd',
  '#8c564b',
];

export function selectionColor(index: number): string {
  return SELECTION_PALETTE[index % SELECTION_PALETTE.length];
}
