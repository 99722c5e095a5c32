import { column, readCsv, SchemaError, Table } from './csv';
import { extent, PALETTE, Scene } from './svg';

export type FigureKind = 'profile' | 'levelset' | 'ledger' | 'coverage'
  | 'escape' | 'gauss';

export interface Style {
  width: number;
  height: number;
  title?: string;
  band?: { a: number; eps: number };
}

export const DEFAULT_STYLE: Style = { width: 720, height: 440 };

type Renderer = (t: Table, style: Style, caption: string) => string;

/** Birkhoff-sum profile across one inner cell, optional a+/-eps band. */
function profile(t: Table, style: Style, caption: string): string {
  const xs = column(t, 'x');
  const vals = column(t, 'value');
  const scene = new Scene(style.width, style.height, extent(xs), extent(vals));
  if (style.band) {
    const { a, eps } = style.band;
    scene.rect(scene.xe.lo, a - eps, scene.xe.hi, a + eps, '#fdd', 0.8);
    scene.line(scene.xe.lo, a, scene.xe.hi, a, '#d62728', 0.8);
  }
  scene.polyline(xs, vals, PALETTE[0]);
  scene.axes('x', 'rigid Birkhoff sum');
  scene.title(style.title ?? 'rigid-sum profile');
  scene.caption(caption);
  return scene.render();
}

/** Level-set intervals: horizontal bars at their midpoint Birkhoff value. */
function levelset(t: Table, style: Style, caption: string): string {
  const left = column(t, 'left');
  const right = column(t, 'right');
  const mid = column(t, 'midpoint_value');
  const scene = new Scene(style.width, style.height,
    extent([...left, ...right]), extent(mid));
  for (let i = 0; i < left.length; i++) {
    scene.line(left[i], mid[i], right[i], mid[i], PALETTE[0], 2);
  }
  scene.axes('circle position', 'midpoint value');
  scene.title(style.title ?? `level-set intervals (${left.length} cells)`);
  scene.caption(caption);
  return scene.render();
}

/** Stacked good/bad hole counts per stage. */
function ledger(t: Table, style: Style, caption: string): string {
  const stages = column(t, 'stage');
  const cls = column(t, 'class'); // 1 = good, 0 = bad
  const byStage = new Map<number, { good: number; bad: number }>();
  stages.forEach((s, i) => {
    const e = byStage.get(s) ?? { good: 0, bad: 0 };
    if (cls[i] === 1) e.good += 1; else e.bad += 1;
    byStage.set(s, e);
  });
  const keys = [...byStage.keys()].sort((a, b) => a - b);
  const tallest = Math.max(...keys.map((k) => {
    const e = byStage.get(k)!;
    return e.good + e.bad;
  }));
  const scene = new Scene(style.width, style.height,
    { lo: -0.5, hi: keys.length - 0.5 }, { lo: 0, hi: tallest * 1.05 });
  keys.forEach((k, i) => {
    const e = byStage.get(k)!;
    scene.rect(i - 0.3, 0, i + 0.3, e.good, PALETTE[2]);
    scene.rect(i - 0.3, e.good, i + 0.3, e.good + e.bad, PALETTE[1]);
  });
  scene.axes('stage', 'holes (good below, bad above)', keys.length - 1 || 1);
  scene.title(style.title ?? 'hole ledger');
  scene.caption(caption);
  return scene.render();
}

/** Union measure per prefix with per-level bars. */
function coverage(t: Table, style: Style, caption: string): string {
  const prefix = column(t, 'prefix');
  const union = column(t, 'union_measure');
  const level = column(t, 'level_measure');
  const scene = new Scene(style.width, style.height,
    { lo: 0.5, hi: prefix.length + 0.5 }, { lo: 0, hi: Math.max(...union) * 1.15 });
  prefix.forEach((p, i) => {
    scene.rect(p - 0.35, 0, p + 0.35, level[i], PALETTE[0], 0.45);
  });
  scene.polyline(prefix, union, PALETTE[1], 2);
  prefix.forEach((p, i) => scene.circle(p, union[i], 3, PALETTE[1]));
  scene.axes('levels included', 'measure', prefix.length - 1 || 1);
  scene.title(style.title ?? 'coverage: union vs per-level measure');
  scene.caption(caption);
  return scene.render();
}

/** Escape-of-mass curves: estimate vs M per level. */
function escape(t: Table, style: Style, caption: string): string {
  const levels = column(t, 'level');
  const m = column(t, 'M');
  const est = column(t, 'estimate');
  const uniq = [...new Set(levels)].sort((a, b) => a - b);
  const scene = new Scene(style.width, style.height, extent(m),
    { lo: 0, hi: Math.max(...est) * 1.1 + 1e-6 });
  uniq.forEach((lv, j) => {
    const pts = levels.map((v, i) => i).filter((i) => levels[i] === lv)
      .sort((a, b) => m[a] - m[b]);
    scene.polyline(pts.map((i) => m[i]), pts.map((i) => est[i]),
      PALETTE[j % PALETTE.length], 2);
    pts.forEach((i) => scene.circle(m[i], est[i], 3, PALETTE[j % PALETTE.length]));
    scene.text(scene.px(m[pts[pts.length - 1]]) - 8,
      scene.py(est[pts[pts.length - 1]]) - 8, `level ${lv}`, 10, 'end');
  });
  scene.axes('M', 'measure of {|sum| <= M}');
  scene.title(style.title ?? 'escape of mass');
  scene.caption(caption);
  return scene.render();
}

/** Digit histogram: empirical frequency vs invariant-measure prediction. */
function gauss(t: Table, style: Style, caption: string): string {
  const k = column(t, 'k');
  const freq = column(t, 'frequency');
  const pred = column(t, 'prediction');
  const top = Math.max(...freq, ...pred) * 1.15;
  const scene = new Scene(style.width, style.height,
    { lo: Math.min(...k) - 0.6, hi: Math.max(...k) + 0.6 }, { lo: 0, hi: top });
  k.forEach((kk, i) => {
    scene.rect(kk - 0.35, 0, kk, freq[i], PALETTE[0]);
    scene.rect(kk, 0, kk + 0.35, pred[i], PALETTE[4]);
  });
  scene.axes('digit k', 'frequency (left) vs prediction (right)',
    Math.min(k.length - 1, 8) || 1);
  scene.title(style.title ?? 'digit statistics');
  scene.caption(caption);
  return scene.render();
}

const RENDERERS: Record<FigureKind, Renderer> = {
  profile, levelset, ledger, coverage, escape, gauss,
};

export function renderFigure(kind: FigureKind, csvPath: string, style: Style,
  configHash: string): string {
  const renderer = RENDERERS[kind];
  if (!renderer) throw new SchemaError(`unknown figure kind '${kind}'`);
  const table = readCsv(csvPath);
  return renderer(table, style, `config ${configHash}`);
}
