/** Least-squares line fit utilities shared by the figure kinds. */

export interface LineFit {
  slope: number;
  intercept: number;
}

export function leastSquares(xs: number[], ys: number[]): LineFit {
  const n = xs.length;
  if (n < 2) throw new Error("need at least two points to fit a line");
  let sx = 0;
  let sy = 0;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const denom = n * sxx - sx * sx;
  if (denom === 0) throw new Error("degenerate abscissa for line fit");
  const slope = (n * sxy - sx * sy) / denom;
  return { slope, intercept: (sy - slope * sx) / n };
}

/**
 * Slope of y vs x over the trailing half of the series; the early part is
 * excluded so start-up transients do not contaminate growth exponents.
 */
export function tailSlope(xs: number[], ys: number[], tailFraction = 0.5): LineFit {
  const start = Math.floor(xs.length * (1 - tailFraction));
  return leastSquares(xs.slice(start), ys.slice(start));
}
