#include "fuzzysched/svg.hpp"

#include <iomanip>
#include <sstream>

#include "fuzzysched/errors.hpp"

namespace fuzzysched {

namespace {

struct Frame {
  double left, top, width, height;
  double t0, t1;

  double x(double t) const { return left + (t - t0) / (t1 - t0) * width; }
  double y(double v) const { return top + (1.0 - v) * height; }
};

void append_points(std::ostringstream& out, const Frame& f, const SampledFunction& fn,
                   bool reversed = false) {
  const std::size_t n = fn.grid.step_count;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = reversed ? n - 1 - i : i;
    out << f.x(fn.grid.time_at(j)) << ',' << f.y(fn.values[j]) << ' ';
  }
}

}  // namespace

std::string render_summary_svg(const SatisfactionEnsemble& e, int width, int height) {
  if (width <= 80 || height <= 80) throw ValidationError("svg canvas too small");

  const Frame f{50.0, 30.0, width - 65.0, height - 65.0, e.grid.start_s, e.grid.last_time()};
  const SampledFunction median = pointwise_median(e);
  const SampledFunction lo = pointwise_quantile(e, 0.25);
  const SampledFunction hi = pointwise_quantile(e, 0.75);
  const SampledFunction env_min = pointwise_min(e);
  const SampledFunction env_max = pointwise_max(e);

  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << e.instruction_tag << "</text>\n";

  // axes with a handful of ticks
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\""
      << f.top + f.height << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top + f.height << "\" x2=\""
      << f.left + f.width << "\" y2=\"" << f.top + f.height << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = f.t0 + (f.t1 - f.t0) * i / 4.0;
    out << "<text x=\"" << f.x(t) << "\" y=\"" << f.top + f.height + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << std::setprecision(0) << t << std::setprecision(2) << "</text>\n";
  }
  for (double v : {0.0, 0.5, 1.0}) {
    out << "<text x=\"" << f.left - 6 << "\" y=\"" << f.y(v) + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << std::setprecision(1) << v << std::setprecision(2) << "</text>\n";
  }
  out << "<text x=\"" << f.left + f.width / 2 << "\" y=\"" << height - 6
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">time (s)"
         "</text>\n";

  // interquartile band: upper quantile out, lower quantile back
  out << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
  append_points(out, f, hi);
  append_points(out, f, lo, /*reversed=*/true);
  out << "\"/>\n";

  for (const auto* env : {&env_min, &env_max}) {
    out << "<polyline fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" "
           "stroke-dasharray=\"4 3\" points=\"";
    append_points(out, f, *env);
    out << "\"/>\n";
  }

  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  append_points(out, f, median);
  out << "\"/>\n";

  out << "</svg>\n";
  return out.str();
}

}  // namespace fuzzysched
