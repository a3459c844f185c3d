import { describe, expect, it } from 'vitest';
import {
  fmtCount,
  fmtMoney,
  fmtPercent,
  fmtPoints,
  fmtProbability,
  fmtYearsMonths,
} from '../src/utils/format';

describe('fmtCount', () => {
  it('groups thousands', () => {
    expect(fmtCount(1470)).toBe('1,470');
    expect(fmtCount(0)).toBe('0');
  });
});

describe('fmtPercent / fmtProbability', () => {
  it('renders one decimal of a percent', () => {
    expect(fmtPercent(0.16122448979591836)).toBe('16.1%');
    expect(fmtProbability(0.32)).toBe('32.0%');
    expect(fmtProbability(0)).toBe('0.0%');
    expect(fmtProbability(1)).toBe('100.0%');
  });
});

describe('fmtMoney', () => {
  it('rounds and groups', () => {
    expect(fmtMoney(9482.865986394558)).toBe('9,483');
  });

  it('handles a dataset without a pay column', () => {
    expect(fmtMoney(null)).toBe('n/a');
    expect(fmtMoney(NaN)).toBe('n/a');
  });
});

describe('fmtYearsMonths', () => {
  it('splits years into whole years and months', () => {
    expect(fmtYearsMonths(2.18)).toBe('2y 2m');
    expect(fmtYearsMonths(0)).toBe('0y 0m');
    expect(fmtYearsMonths(5)).toBe('5y 0m');
  });

  it('carries rounded months into the year part', () => {
    // 1.99 years is 23.88 months, rounding to 24
    expect(fmtYearsMonths(1.99)).toBe('2y 0m');
  });

  it('keeps the sign for negative spans', () => {
    expect(fmtYearsMonths(-1.5)).toBe('-1y 6m');
    expect(fmtYearsMonths(-0.001)).toBe('0y 0m');
  });
});

describe('fmtPoints', () => {
  it('signs probability-point deltas', () => {
    expect(fmtPoints(0.16)).toBe('+16.0');
    expect(fmtPoints(-0.20958333333333334)).toBe('-21.0');
    expect(fmtPoints(0)).toBe('+0.0');
  });
});
