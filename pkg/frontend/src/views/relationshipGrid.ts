import { clear, divergingShade, el, linearScale, svgEl } from '../render';
import { InfluenceDoc, ScenarioRow, SpecDoc } from '../types';

const SIZE = 130;
const CX = SIZE / 2;
const CY = SIZE / 2 + 12;
const RADIUS = 42;

// Relationship View: a table of glyphs, one row per selected scenario and
// one column per indicator. Each glyph is a k-sided polygon (k =
// attribute count) split into per-attribute sectors shaded on the
// red<->green diverging scale by normalized influence; small side bars
// show the scenario's attribute deltas; the arc on top marks the
// predicted indicator score inside the score bounds, with the ensemble
// min..max range drawn as the thicker segment.
export class RelationshipGridView {
  constructor(private readonly root: HTMLElement) {}

  render(matrix: InfluenceDoc, rows: ScenarioRow[], spec: SpecDoc): void {
    clear(this.root);
    this.root.appendChild(el('div', { class: 'view-title' }, 'Relationships'));
    const rowById = new Map(rows.map((row) => [row.scenario_id, row]));

    const table = el('table', { class: 'relationship-grid' });
    const head = el('tr');
    head.appendChild(el('th', {}, ''));
    for (const indicator of matrix.indicators) head.appendChild(el('th', {}, indicator));
    table.appendChild(el('thead')).appendChild(head);

    const body = el('tbody');
    for (const scenarioId of matrix.scenario_ids) {
      const tr = el('tr', { 'data-scenario-id': String(scenarioId) });
      tr.appendChild(el('th', {}, `scenario ${scenarioId}`));
      for (const indicator of matrix.indicators) {
        const td = el('td', { class: 'glyph-cell' });
        td.appendChild(
          this.glyph(matrix, scenarioId, indicator, rowById.get(scenarioId), spec),
        );
        tr.appendChild(td);
      }
      body.appendChild(tr);
    }
    table.appendChild(body);
    this.root.appendChild(table);
  }

  private glyph(
    matrix: InfluenceDoc,
    scenarioId: number,
    indicator: string,
    row: ScenarioRow | undefined,
    spec: SpecDoc,
  ): SVGSVGElement {
    const svg = svgEl('svg', {
      width: String(SIZE),
      height: String(SIZE),
      class: 'relationship-glyph',
      'data-scenario-id': String(scenarioId),
      'data-indicator': indicator,
    });
    const attributes = matrix.attributes;
    const k = attributes.length;
    const entries = matrix.entries[String(scenarioId)][indicator];

    // Polygon vertices of the k-gon, first vertex pointing up.
    const vertex = (i: number): [number, number] => {
      const angle = -Math.PI / 2 + (2 * Math.PI * i) / k;
      return [CX + RADIUS * Math.cos(angle), CY + RADIUS * Math.sin(angle)];
    };

    attributes.forEach((attribute, i) => {
      const entry = entries[attribute];
      const [x1, y1] = vertex(i);
      const [x2, y2] = vertex(i + 1);
      const sector = svgEl('polygon', {
        points: `${CX},${CY} ${x1},${y1} ${x2},${y2}`,
        class: this.sectorClass(entry.normalized, entry.flag),
        'data-attribute': attribute,
        'data-influence': String(entry.normalized),
        fill: entry.flag === 'domain_error' ? '#ddd' : divergingShade(entry.normalized),
      });
      svg.appendChild(sector);
    });
    svg.appendChild(
      svgEl('polygon', {
        points: attributes.map((_, i) => vertex(i).join(',')).join(' '),
        class: 'glyph-outline',
        fill: 'none',
      }),
    );

    // Side bars: the scenario's attribute changes relative to last year.
    if (row) {
      const extreme = Math.max(
        ...attributes.map((a) => Math.abs(row.attributes[a].delta)),
        1e-9,
      );
      attributes.forEach((attribute, i) => {
        const delta = row.attributes[attribute].delta;
        const length = (Math.abs(delta) / extreme) * 18;
        const y = CY - RADIUS + i * 12;
        svg.appendChild(
          svgEl('rect', {
            x: String(delta >= 0 ? 6 : 6 + (18 - length)),
            y: String(y),
            width: String(Math.max(length, 0.5)),
            height: '6',
            class: delta >= 0 ? 'side-bar delta-pos' : 'side-bar delta-neg',
            'data-attribute': attribute,
            'data-delta': String(delta),
          }),
        );
      });
    }

    // Top arc: predicted score inside [score_min, score_max].
    if (row) {
      const cell = indicator === 'final' ? row.final : row.indicators[indicator];
      const [scoreMin, scoreMax] = spec.score_bounds;
      const t = linearScale(scoreMin, scoreMax, 0, 1);
      svg.appendChild(this.arcPath(0, 1, 'score-arc'));
      svg.appendChild(this.arcPath(t(cell.min), t(cell.max), 'score-arc-band'));
      const [mx, my] = this.arcPoint(t(cell.mean));
      svg.appendChild(
        svgEl('line', {
          x1: String(mx),
          y1: String(my - 5),
          x2: String(mx),
          y2: String(my + 5),
          class: 'score-tick',
          'data-score': String(cell.mean),
        }),
      );
    }
    return svg;
  }

  private sectorClass(normalized: number, flag: string | null): string {
    if (flag === 'domain_error') return 'sector sector-flagged';
    if (normalized > 0) return 'sector sector-pos';
    if (normalized < 0) return 'sector sector-neg';
    return 'sector sector-zero';
  }

  // Shallow quadratic arc above the polygon; t in [0, 1] along it.
  private arcPoint(t: number): [number, number] {
    const x0 = CX - RADIUS - 8;
    const x1 = CX + RADIUS + 8;
    const y0 = 18;
    const peak = 6;
    const x = x0 + (x1 - x0) * t;
    const y = y0 - 4 * peak * t * (1 - t);
    return [x, y];
  }

  private arcPath(from: number, to: number, cls: string): SVGPathElement {
    const steps = 16;
    const points: string[] = [];
    for (let i = 0; i <= steps; i++) {
      const [x, y] = this.arcPoint(from + ((to - from) * i) / steps);
      points.push(`${i === 0 ? 'M' : 'L'}${x},${y}`);
    }
    return svgEl('path', { d: points.join(' '), class: cls, fill: 'none' });
  }
}
