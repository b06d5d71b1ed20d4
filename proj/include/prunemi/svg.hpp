// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0
//
// Static SVG line charts for experiment summaries.

#pragma once

#include <string>
#include <vector>

namespace prunemi {

struct SvgPoint {
  double x = 0.0;
  double y = 0.0;
  double err = 0.0;  // half-height of the error bar; 0 draws none
};

struct SvgSeries {
  std::string label;
  std::vector<SvgPoint> points;  // drawn in the given order
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<SvgSeries> series;
};

std::string render_line_chart(const SvgChart& chart);

}  // namespace prunemi
