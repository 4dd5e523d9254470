/** Deterministic SVG primitives: fixed-precision coordinates, no timestamps. */

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN = { left: 80, right: 24, top: 32, bottom: 56 };

export type Scale = {
  (v: number): number;
  ticks(): number[];
  domain: [number, number];
};

const fmt = (v: number): string => {
  const r = Math.round(v * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
};

/** Compact label for tick values across many orders of magnitude. */
export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const exp = Math.floor(Math.log10(Math.abs(v)));
  if (exp >= -3 && exp < 4) {
    const s = v.toPrecision(3);
    return String(Number(s));
  }
  const mant = v / 10 ** exp;
  const m = Math.round(mant * 100) / 100;
  return m === 1 ? `1e${exp}` : `${m}e${exp}`;
}

export function linearScale(lo: number, hi: number, r0: number, r1: number): Scale {
  const span = hi - lo || 1;
  const f = ((v: number) => r0 + ((v - lo) / span) * (r1 - r0)) as Scale;
  f.domain = [lo, hi];
  f.ticks = () => {
    const raw = span / 5;
    const pow = 10 ** Math.floor(Math.log10(raw));
    const step = [1, 2, 5, 10].map((m) => m * pow).find((s) => span / s <= 6)!;
    const out: number[] = [];
    for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step) {
      out.push(Math.abs(t) < step * 1e-9 ? 0 : t);
    }
    return out;
  };
  return f;
}

export function logScale(lo: number, hi: number, r0: number, r1: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const f = ((v: number) => r0 + ((Math.log10(v) - llo) / span) * (r1 - r0)) as Scale;
  f.domain = [lo, hi];
  f.ticks = () => {
    const out: number[] = [];
    let step = 1;
    while (span / step > 8) step += 1;
    for (let e = Math.ceil(llo - 1e-9); e <= lhi + 1e-9; e += step) {
      out.push(10 ** e);
    }
    return out;
  };
  return f;
}

export function path(xs: number[], ys: number[], sx: Scale, sy: Scale): string {
  return xs
    .map((x, i) => `${i === 0 ? "M" : "L"}${fmt(sx(x))} ${fmt(sy(ys[i]))}`)
    .join(" ");
}

export function polygon(pts: Array<[number, number]>): string {
  return pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface Frame {
  body: string[];
  sx: Scale;
  sy: Scale;
}

/** Axes, tick marks, labels and a clip rect; body elements appended later. */
export function frame(
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
  title: string,
): Frame {
  const { left, right, top, bottom } = MARGIN;
  const x1 = WIDTH - right;
  const y1 = HEIGHT - bottom;
  const body: string[] = [];
  body.push(
    `<rect x="${left}" y="${top}" width="${x1 - left}" height="${y1 - top}" fill="none" stroke="#000"/>`,
  );
  for (const t of sx.ticks()) {
    const px = fmt(sx(t));
    body.push(`<line x1="${px}" y1="${y1}" x2="${px}" y2="${y1 + 5}" stroke="#000"/>`);
    body.push(
      `<text x="${px}" y="${y1 + 20}" text-anchor="middle" font-size="12">${tickLabel(t)}</text>`,
    );
  }
  for (const t of sy.ticks()) {
    const py = fmt(sy(t));
    body.push(`<line x1="${left - 5}" y1="${py}" x2="${left}" y2="${py}" stroke="#000"/>`);
    body.push(
      `<text x="${left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="12">${tickLabel(t)}</text>`,
    );
  }
  body.push(
    `<text x="${(left + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="14">${xLabel}</text>`,
  );
  body.push(
    `<text x="18" y="${(top + y1) / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 18 ${(top + y1) / 2})">${yLabel}</text>`,
  );
  body.push(
    `<text x="${(left + x1) / 2}" y="${top - 10}" text-anchor="middle" font-size="15">${title}</text>`,
  );
  return { body, sx, sy };
}

export function render(f: Frame): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
    `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">\n` +
    f.body.join("\n") +
    "\n</svg>\n"
  );
}
