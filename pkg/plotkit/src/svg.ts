/** Deterministic SVG scene builder: fixed formatting, no timestamps. */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  const s = v.toPrecision(6);
  return s.includes('.') ? s.replace(/\.?0+$/, '').replace(/\.?0+e/, 'e') : s;
}

export interface Extent {
  lo: number;
  hi: number;
}

export function extent(values: number[], pad = 0.05): Extent {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const span = hi - lo;
  return { lo: lo - pad * span, hi: hi + pad * span };
}

export class Scene {
  readonly width: number;
  readonly height: number;
  private parts: string[] = [];

  // plot area margins: left, top, right, bottom
  readonly m = { l: 64, t: 36, r: 16, b: 56 };

  constructor(width: number, height: number, public xe: Extent, public ye: Extent) {
    this.width = width;
    this.height = height;
  }

  px(x: number): number {
    return this.m.l + ((x - this.xe.lo) / (this.xe.hi - this.xe.lo))
      * (this.width - this.m.l - this.m.r);
  }

  py(y: number): number {
    return this.height - this.m.b - ((y - this.ye.lo) / (this.ye.hi - this.ye.lo))
      * (this.height - this.m.t - this.m.b);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1) {
    this.parts.push(`<line x1="${fmt(this.px(x1))}" y1="${fmt(this.py(y1))}" `
      + `x2="${fmt(this.px(x2))}" y2="${fmt(this.py(y2))}" stroke="${stroke}" `
      + `stroke-width="${width}"/>`);
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 1.5) {
    const pts = xs.map((x, i) => `${fmt(this.px(x))},${fmt(this.py(ys[i]))}`).join(' ');
    this.parts.push(`<polyline points="${pts}" fill="none" stroke="${stroke}" `
      + `stroke-width="${width}"/>`);
  }

  rect(x1: number, y1: number, x2: number, y2: number, fill: string, opacity = 1) {
    const [xa, xb] = [this.px(x1), this.px(x2)].sort((a, b) => a - b);
    const [ya, yb] = [this.py(y1), this.py(y2)].sort((a, b) => a - b);
    this.parts.push(`<rect x="${fmt(xa)}" y="${fmt(ya)}" width="${fmt(xb - xa)}" `
      + `height="${fmt(yb - ya)}" fill="${fill}" opacity="${opacity}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string) {
    this.parts.push(`<circle cx="${fmt(this.px(x))}" cy="${fmt(this.py(y))}" `
      + `r="${r}" fill="${fill}"/>`);
  }

  text(x: number, y: number, s: string, size = 12, anchor = 'middle') {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" `
      + `font-family="sans-serif" text-anchor="${anchor}">${escapeXml(s)}</text>`);
  }

  axes(xlabel: string, ylabel: string, ticks = 5) {
    const x0 = this.m.l;
    const y0 = this.height - this.m.b;
    const x1 = this.width - this.m.r;
    const y1 = this.m.t;
    this.parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" `
      + `height="${y0 - y1}" fill="none" stroke="#222"/>`);
    for (let i = 0; i <= ticks; i++) {
      const fx = this.xe.lo + (i / ticks) * (this.xe.hi - this.xe.lo);
      const fy = this.ye.lo + (i / ticks) * (this.ye.hi - this.ye.lo);
      this.text(this.px(fx), y0 + 18, fmt(fx), 10);
      this.text(x0 - 6, this.py(fy) + 4, fmt(fy), 10, 'end');
      this.parts.push(`<line x1="${fmt(this.px(fx))}" y1="${y0}" `
        + `x2="${fmt(this.px(fx))}" y2="${y0 + 4}" stroke="#222"/>`);
      this.parts.push(`<line x1="${x0 - 4}" y1="${fmt(this.py(fy))}" `
        + `x2="${x0}" y2="${fmt(this.py(fy))}" stroke="#222"/>`);
    }
    this.text((x0 + x1) / 2, this.height - 16, xlabel);
    this.parts.push(`<text x="18" y="${(y0 + y1) / 2}" font-size="12" `
      + `font-family="sans-serif" text-anchor="middle" `
      + `transform="rotate(-90 18 ${(y0 + y1) / 2})">${escapeXml(ylabel)}</text>`);
  }

  title(s: string) {
    this.text(this.width / 2, 20, s, 14);
  }

  caption(s: string) {
    this.text(this.width / 2, this.height - 2, s, 9);
  }

  render(): string {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" `
      + `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n`
      + `<rect width="${this.width}" height="${this.height}" fill="white"/>\n`
      + this.parts.join('\n') + '\n</svg>\n';
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
  '#8c564b'];
