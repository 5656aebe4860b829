/**
 * Chart builders + headless SVG rendering (echarts server-side renderer; no
 * DOM, no canvas).
 *
 * Exponent figure: one line per rate across dimensions, drawn and listed in
 * the documented order previous, new, minimax.
 *
 * L2 figure: per depth rule, the median test error against the data-set size
 * with a shaded band between the 25% and 75% seed quantiles.
 */

import * as echarts from "echarts";
import type { EChartsOption, SeriesOption } from "echarts";

import { ExponentRow, L2Row, SchemaError } from "./schema";
import { median, quantile } from "./stats";

export const EXPONENT_CURVE_ORDER = ["previous", "new", "minimax"] as const;

export function exponentChartOption(rows: ExponentRow[]): EChartsOption {
  const sorted = [...rows].sort((a, b) => a.d - b.d);
  const dims = sorted.map((r) => r.d);
  const variant = sorted[0].variant;
  const values: Record<(typeof EXPONENT_CURVE_ORDER)[number], number[]> = {
    previous: sorted.map((r) => r.previous),
    new: sorted.map((r) => r.newRate),
    minimax: sorted.map((r) => r.minimax),
  };
  const series: SeriesOption[] = EXPONENT_CURVE_ORDER.map((name) => ({
    name,
    type: "line",
    data: values[name],
    symbolSize: 5,
  }));
  return {
    animation: false,
    title: { text: `Rate exponents (${variant} forest)`, left: "center" },
    legend: { data: [...EXPONENT_CURVE_ORDER], bottom: 0 },
    xAxis: { type: "category", name: "d", data: dims.map(String) },
    yAxis: { type: "value", name: "exponent of n" },
    series,
  };
}

interface RuleCurve {
  rule: string;
  medians: number[];
  lower: number[];
  upper: number[];
}

export function l2Curves(rows: L2Row[]): { sizes: number[]; curves: RuleCurve[] } {
  const sizes = [...new Set(rows.map((r) => r.n))].sort((a, b) => a - b);
  const rules = [...new Set(rows.map((r) => r.rule))].sort();
  const curves = rules.map((rule) => {
    const medians: number[] = [];
    const lower: number[] = [];
    const upper: number[] = [];
    for (const n of sizes) {
      const errs = rows.filter((r) => r.rule === rule && r.n === n).map((r) => r.l2Error);
      if (errs.length === 0) {
        throw new SchemaError(`rule "${rule}" has no rows for n=${n}`);
      }
      medians.push(median(errs));
      lower.push(quantile(errs, 0.25));
      upper.push(quantile(errs, 0.75));
    }
    return { rule, medians, lower, upper };
  });
  return { sizes, curves };
}

export function l2ChartOption(rows: L2Row[]): EChartsOption {
  const { sizes, curves } = l2Curves(rows);
  const variant = rows[0].variant;
  const series: SeriesOption[] = [];
  for (const curve of curves) {
    // invisible lower edge + stacked delta shade the interquartile band
    series.push({
      name: `${curve.rule} band lower`,
      type: "line",
      data: curve.lower,
      stack: `band-${curve.rule}`,
      lineStyle: { opacity: 0 },
      symbol: "none",
      silent: true,
      tooltip: { show: false },
    });
    series.push({
      name: `${curve.rule} band`,
      type: "line",
      data: curve.upper.map((u, i) => u - curve.lower[i]),
      stack: `band-${curve.rule}`,
      lineStyle: { opacity: 0 },
      areaStyle: { opacity: 0.25 },
      symbol: "none",
      silent: true,
      tooltip: { show: false },
    });
    series.push({
      name: curve.rule,
      type: "line",
      data: curve.medians,
      symbolSize: 6,
    });
  }
  return {
    animation: false,
    title: { text: `L2 error vs data-set size (${variant} KeRF)`, left: "center" },
    legend: { data: curves.map((c) => c.rule), bottom: 0 },
    xAxis: { type: "category", name: "n", data: sizes.map(String) },
    yAxis: { type: "value", name: "L2 error" },
    series,
  };
}

export function renderSvg(option: EChartsOption, width = 840, height = 560): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
