import { clear, el, linearScale, probabilityColor, svgEl } from '../render';
import { HeatmapDoc, RadarDoc, SpecDoc } from '../types';

export interface RivalCallbacks {
  onMethod(method: string): void;
  onHighlight(rivalId: string | null): void;
}

const RADAR_SIZE = 320;
const RADAR_CX = RADAR_SIZE / 2;
const RADAR_CY = RADAR_SIZE / 2;
const AXIS_LEN = 120;
const VIOLIN_HALF = 10;

// Rival View: a heat map of win probabilities (one row per prediction
// method per rival, one column per indicator plus final) and a radar
// chart for one method chosen from a drop-down. The radar overlays our
// per-subject score distributions (violins along each axis) with every
// rival's expected-value polyline; clicking a rival highlights it and
// also fetches its full distribution.
export class RivalViewsView {
  constructor(
    private readonly root: HTMLElement,
    private readonly callbacks: RivalCallbacks,
  ) {}

  render(
    heat: HeatmapDoc,
    radar: RadarDoc,
    spec: SpecDoc,
    highlight: string | null,
  ): void {
    clear(this.root);
    this.root.appendChild(el('div', { class: 'view-title' }, 'Rivals'));
    this.root.appendChild(this.heatTable(heat));
    this.root.appendChild(this.methodSelect(heat.methods, radar.method));
    this.root.appendChild(this.radarChart(radar, spec, highlight));
    this.root.appendChild(this.legend(heat.rivals, highlight));
  }

  private heatTable(heat: HeatmapDoc): HTMLElement {
    const byKey = new Map(
      heat.cells.map((cell) => [`${cell.rival_id}|${cell.method_id}|${cell.subject}`, cell]),
    );
    const table = el('table', { class: 'rival-heatmap' });
    const head = el('tr');
    head.appendChild(el('th', {}, 'rival'));
    head.appendChild(el('th', {}, 'method'));
    for (const subject of heat.subjects) head.appendChild(el('th', {}, subject));
    table.appendChild(el('thead')).appendChild(head);

    const body = el('tbody');
    for (const rival of heat.rivals) {
      heat.methods.forEach((method, methodIndex) => {
        const tr = el('tr', { 'data-rival': rival, 'data-method': method });
        if (methodIndex === 0) {
          const th = el('th', { rowspan: String(heat.methods.length) }, rival);
          th.addEventListener('click', () => this.callbacks.onHighlight(rival));
          tr.appendChild(th);
        }
        tr.appendChild(el('td', { class: 'method-name' }, method));
        for (const subject of heat.subjects) {
          const cell = byKey.get(`${rival}|${method}|${subject}`);
          const td = el('td', {
            class: cell && cell.probability !== null ? 'heat-cell' : 'heat-cell heat-na',
            'data-rival': rival,
            'data-method': method,
            'data-subject': subject,
          });
          if (cell && cell.probability !== null) {
            td.setAttribute('data-prob', String(cell.probability));
            td.style.backgroundColor = probabilityColor(cell.probability);
            td.textContent = cell.probability.toFixed(2);
          } else {
            td.textContent = 'n/a';
            if (cell?.flag) td.setAttribute('title', cell.flag);
          }
          tr.appendChild(td);
        }
        body.appendChild(tr);
      });
    }
    table.appendChild(body);
    return table;
  }

  private methodSelect(methods: string[], active: string): HTMLElement {
    const wrap = el('div', { class: 'method-picker' });
    wrap.appendChild(el('label', {}, 'radar method: '));
    const select = el('select', { class: 'method-select' });
    for (const method of methods) {
      const option = el('option', { value: method }, method);
      if (method === active) option.setAttribute('selected', 'selected');
      select.appendChild(option);
    }
    select.value = active;
    select.addEventListener('change', () => this.callbacks.onMethod(select.value));
    wrap.appendChild(select);
    return wrap;
  }

  private radarChart(radar: RadarDoc, spec: SpecDoc, highlight: string | null): SVGSVGElement {
    const svg = svgEl('svg', {
      width: String(RADAR_SIZE),
      height: String(RADAR_SIZE),
      class: 'rival-radar',
      'data-method': radar.method,
    });
    const subjects = Object.keys(radar.subjects);
    const k = subjects.length;
    const [scoreMin, scoreMax] = spec.score_bounds;
    const t = linearScale(scoreMin, scoreMax, 0, AXIS_LEN);

    const axisPoint = (i: number, radial: number): [number, number] => {
      const angle = -Math.PI / 2 + (2 * Math.PI * i) / k;
      return [RADAR_CX + radial * Math.cos(angle), RADAR_CY + radial * Math.sin(angle)];
    };

    subjects.forEach((subject, i) => {
      const [x, y] = axisPoint(i, AXIS_LEN);
      svg.appendChild(
        svgEl('line', {
          x1: String(RADAR_CX),
          y1: String(RADAR_CY),
          x2: String(x),
          y2: String(y),
          class: 'radar-axis',
          'data-subject': subject,
        }),
      );
      const [lx, ly] = axisPoint(i, AXIS_LEN + 14);
      const label = svgEl('text', {
        x: String(lx),
        y: String(ly),
        class: 'radar-label',
        'text-anchor': 'middle',
      });
      label.textContent = subject;
      svg.appendChild(label);

      // Our prediction's distribution as a violin along the axis.
      svg.appendChild(
        this.violin(radar, subject, i, axisPoint, t, 'violin violin-ours', false),
      );
      if (radar.subjects[subject].highlighted) {
        svg.appendChild(
          this.violin(radar, subject, i, axisPoint, t, 'violin violin-rival', true),
        );
      }
    });

    // Rival expected values as closed polylines across the axes.
    const rivalIds = Object.keys(radar.subjects[subjects[0]]?.rival_expected ?? {});
    for (const rival of rivalIds) {
      const points = subjects
        .map((subject, i) => {
          const expected = radar.subjects[subject].rival_expected[rival];
          return axisPoint(i, t(expected)).join(',');
        })
        .join(' ');
      const line = svgEl('polygon', {
        points,
        class: rival === highlight ? 'rival-line rival-line-highlight' : 'rival-line',
        'data-rival': rival,
        fill: 'none',
      });
      line.addEventListener('click', () => this.callbacks.onHighlight(rival));
      svg.appendChild(line);
    }
    return svg;
  }

  private violin(
    radar: RadarDoc,
    subject: string,
    axisIndex: number,
    axisPoint: (i: number, radial: number) => [number, number],
    t: (score: number) => number,
    cls: string,
    highlighted: boolean,
  ): SVGPolygonElement {
    const doc = highlighted
      ? radar.subjects[subject].highlighted!
      : radar.subjects[subject].ours;
    const peak = Math.max(...doc.density, 1e-12);
    const k = Object.keys(radar.subjects).length;
    const angle = -Math.PI / 2 + (2 * Math.PI * axisIndex) / k;
    const nx = -Math.sin(angle); // unit normal to the axis
    const ny = Math.cos(angle);

    const upper: string[] = [];
    const lower: string[] = [];
    doc.density.forEach((d, i) => {
      const mid = (doc.bin_edges[i] + doc.bin_edges[i + 1]) / 2;
      const [ax, ay] = axisPoint(axisIndex, t(mid));
      const width = (d / peak) * VIOLIN_HALF;
      upper.push(`${ax + nx * width},${ay + ny * width}`);
      lower.unshift(`${ax - nx * width},${ay - ny * width}`);
    });
    return svgEl('polygon', {
      points: [...upper, ...lower].join(' '),
      class: cls,
      'data-subject': subject,
    });
  }

  private legend(rivals: string[], highlight: string | null): HTMLElement {
    const wrap = el('div', { class: 'rival-legend' });
    for (const rival of rivals) {
      const chip = el(
        'span',
        {
          class: rival === highlight ? 'rival-chip highlighted' : 'rival-chip',
          'data-rival': rival,
        },
        rival,
      );
      chip.addEventListener('click', () =>
        this.callbacks.onHighlight(rival === highlight ? null : rival),
      );
      wrap.appendChild(chip);
    }
    return wrap;
  }
}
