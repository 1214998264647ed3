/** Ordinary least squares on (x, y) pairs; slope/intercept in those units. */
export function olsFit(
  xs: number[],
  ys: number[],
): { slope: number; intercept: number } {
  if (xs.length !== ys.length || xs.length < 2) {
    throw new Error(`need at least 2 points to fit, got ${xs.length}`);
  }
  const n = xs.length;
  const meanX = xs.reduce((a, b) => a + b, 0) / n;
  const meanY = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i += 1) {
    const dx = xs[i]! - meanX;
    sxx += dx * dx;
    sxy += dx * (ys[i]! - meanY);
  }
  if (sxx === 0) {
    throw new Error("cannot fit a slope: all x values are identical");
  }
  const slope = sxy / sxx;
  return { slope, intercept: meanY - slope * meanX };
}

/** Fitted log-log slope of error against eps: error ~ C * eps^slope. */
export function logLogSlope(eps: number[], errors: number[]): number {
  return olsFit(eps.map(Math.log), errors.map(Math.log)).slope;
}
