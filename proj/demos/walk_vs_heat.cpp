// Compares the Z random walk's return probability with the supremum of the
// heat kernel diagonal on the line complex it acts on.  Both decay like
// t^{-1/2}, so their ratio settles near a constant; the two-column output
// (t, ratio) is gnuplot-ready:
//
//   ./demo_walk_vs_heat > ratio.csv
//   gnuplot -e "set datafile separator ','; plot 'ratio.csv' using 1:2"

#include <iostream>

#include "polyheat/csv.hpp"
#include "polyheat/spec_json.hpp"
#include "polyheat/transfer.hpp"

using namespace polyheat;

int main() {
  std::vector<double> ts;
  for (int i = 0; i < 9; ++i) ts.push_back(10.0 * std::pow(10.0, i / 8.0));
  LargeTimeReport rep = large_time_compare(make_zline(), 40, 0.1, ts);

  csv::Table t({"t", "ratio"});
  for (const auto& row : rep.rows) t.add_row({row.t, row.ratio});
  t.write(std::cout);

  std::cerr << "walk decay rate " << csv::format_double(rep.walk_rate)
            << ", heat decay rate " << csv::format_double(rep.heat_rate)
            << ", ratio window [" << csv::format_double(rep.ratio_min) << ", "
            << csv::format_double(rep.ratio_max) << "]\n";
  return 0;
}
