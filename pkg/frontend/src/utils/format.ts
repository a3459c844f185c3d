/** Display formatting. Pure string shaping; no model math happens here. */

export function fmtCount(n: number): string {
  return n.toLocaleString('en-US');
}

/** 0.1612 -> "16.1%" */
export function fmtPercent(ratio: number, digits = 1): string {
  return `${(ratio * 100).toFixed(digits)}%`;
}

/** Probabilities render at one decimal of a percent everywhere. */
export function fmtProbability(p: number): string {
  return fmtPercent(p, 1);
}

export function fmtMoney(amount: number | null): string {
  if (amount === null || !isFinite(amount)) return 'n/a';
  return Math.round(amount).toLocaleString('en-US');
}

/** Years as "2y 3m"; months rounded, carrying into years at 12. */
export function fmtYearsMonths(years: number): string {
  const totalMonths = Math.round(Math.abs(years) * 12);
  const y = Math.floor(totalMonths / 12);
  const m = totalMonths % 12;
  const sign = years < 0 && totalMonths > 0 ? '-' : '';
  return `${sign}${y}y ${m}m`;
}

/** Contribution delta in probability points, signed, one decimal. */
export function fmtPoints(delta: number): string {
  const points = delta * 100;
  const sign = points >= 0 ? '+' : '';
  return `${sign}${points.toFixed(1)}`;
}
