// Standalone SVG box plots of profit gain ratio per bucket and algorithm.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "edgealloc/bench.hpp"

namespace edgealloc::bench {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Figure {
  std::string axis;
  std::string file;
  std::string title;
  std::string x_label;
};

struct Bucket {
  double order;
  std::string label;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

void emit_plots(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir) {
  if (records.empty()) throw DomainError("emit_plots: no records");
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> algos;
  for (const auto& r : records)
    if (std::find(algos.begin(), algos.end(), r.label()) == algos.end()) algos.push_back(r.label());
  std::sort(algos.begin(), algos.end());

  const Figure figures[] = {
      {"ci", "fig_ci.svg", "Profit gain ratio vs. share of computation-intensive tasks",
       "computation-intensive tasks (%)"},
      {"bi", "fig_bi.svg", "Profit gain ratio vs. share of bandwidth-intensive tasks",
       "bandwidth-intensive tasks (%)"},
      {"size", "fig_size.svg", "Profit gain ratio vs. taskset size", "tasks in taskset"},
  };

  std::ostringstream data;
  data << "axis,bucket,algo,count,whisker_low,q1,median,q3,whisker_high,mean,outliers\n";

  for (const auto& fig : figures) {
    // Only buckets holding at least one record appear on the x axis.
    std::map<double, std::string> bucket_labels;
    std::map<std::pair<double, std::string>, std::vector<double>> samples;
    for (const auto& r : records) {
      Bucket b;
      if (fig.axis == "size") {
        b = {double(r.n_tasks), std::to_string(r.n_tasks)};
      } else {
        const double pct = fig.axis == "ci" ? r.pct_ci : r.pct_bi;
        b = {std::clamp(std::floor(pct / 10.0), 0.0, 9.0), decile_bucket(pct)};
      }
      bucket_labels[b.order] = b.label;
      samples[{b.order, r.label()}].push_back(r.ratio);
    }

    constexpr double width = 960, height = 440;
    constexpr double left = 70, right = 170, top = 50, bottom = 70;
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    const double group_w = plot_w / double(bucket_labels.size());
    const double box_w = std::min(40.0, 0.8 * group_w / double(algos.size()));
    auto y_of = [&](double v) { return top + (1.0 - std::clamp(v, 0.0, 1.0)) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n"
        << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << fig.title << "</text>\n";

    // Axes and y grid.
    svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\"/>\n</g>\n";
    for (int tick = 0; tick <= 5; ++tick) {
      const double v = tick / 5.0;
      svg << "<line x1=\"" << left << "\" y1=\"" << px(y_of(v)) << "\" x2=\"" << left + plot_w
          << "\" y2=\"" << px(y_of(v)) << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n"
          << "<text x=\"" << left - 8 << "\" y=\"" << px(y_of(v) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(v)
          << "</text>\n";
    }
    svg << "<text x=\"18\" y=\"" << px(top + plot_h / 2) << "\" transform=\"rotate(-90 18 "
        << px(top + plot_h / 2) << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">profit gain ratio</text>\n"
        << "<text x=\"" << px(left + plot_w / 2) << "\" y=\"" << height - 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << fig.x_label
        << "</text>\n";

    std::size_t g = 0;
    for (const auto& [order, label] : bucket_labels) {
      const double gx = left + group_w * (double(g) + 0.5);
      svg << "<text x=\"" << px(gx) << "\" y=\"" << px(top + plot_h + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label
          << "</text>\n";
      for (std::size_t a = 0; a < algos.size(); ++a) {
        auto it = samples.find({order, algos[a]});
        if (it == samples.end()) continue;
        const BoxStats st = box_stats(it->second);
        const std::string color = kPalette[a % std::size(kPalette)];
        const double cx = gx + (double(a) - 0.5 * double(algos.size() - 1)) * box_w * 1.15;
        const double x0 = cx - box_w / 2;

        data << fig.axis << ',' << label << ',' << algos[a] << ',' << st.count << ','
             << num(st.whisker_low) << ',' << num(st.q1) << ',' << num(st.median) << ','
             << num(st.q3) << ',' << num(st.whisker_high) << ',' << num(st.mean) << ','
             << st.outliers.size() << '\n';

        svg << "<g class=\"box\" data-axis=\"" << fig.axis << "\" data-bucket=\"" << label
            << "\" data-algo=\"" << algos[a] << "\" data-count=\"" << st.count
            << "\" data-whisker-low=\"" << num(st.whisker_low) << "\" data-q1=\"" << num(st.q1)
            << "\" data-median=\"" << num(st.median) << "\" data-q3=\"" << num(st.q3)
            << "\" data-whisker-high=\"" << num(st.whisker_high) << "\" data-mean=\""
            << num(st.mean) << "\">\n";
        svg << "<line x1=\"" << px(cx) << "\" y1=\"" << px(y_of(st.whisker_low)) << "\" x2=\""
            << px(cx) << "\" y2=\"" << px(y_of(st.whisker_high)) << "\" stroke=\"" << color
            << "\"/>\n";
        svg << "<rect x=\"" << px(x0) << "\" y=\"" << px(y_of(st.q3)) << "\" width=\"" << px(box_w)
            << "\" height=\"" << px(std::max(0.5, y_of(st.q1) - y_of(st.q3))) << "\" fill=\""
            << color << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\"/>\n";
        svg << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y_of(st.median)) << "\" x2=\""
            << px(x0 + box_w) << "\" y2=\"" << px(y_of(st.median)) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(y_of(st.mean))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        for (double o : st.outliers)
          svg << "<circle cx=\"" << px(cx) << "\" cy=\"" << px(y_of(o)) << "\" r=\"2\" "
              << "fill=\"none\" stroke=\"" << color << "\"/>\n";
        svg << "</g>\n";
      }
      ++g;
    }

    for (std::size_t a = 0; a < algos.size(); ++a) {
      const double ly = top + 10 + 20.0 * double(a);
      svg << "<rect x=\"" << left + plot_w + 20 << "\" y=\"" << px(ly) << "\" width=\"12\" "
          << "height=\"12\" fill=\"" << kPalette[a % std::size(kPalette)] << "\"/>\n"
          << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << px(ly + 10)
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << algos[a] << "</text>\n";
    }
    svg << "</svg>\n";
    write_file(out_dir / fig.file, svg.str());
  }

  write_file(out_dir / "boxplot_data.csv", data.str());
  write_file(out_dir / "records.csv", records_to_csv(records));
}

}  // namespace edgealloc::bench
