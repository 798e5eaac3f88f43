#pragma once

// Runs the command-line front end in-process and parses its CSV output.

#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"

namespace harness {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

inline Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fracvel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.status = fracvel::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      if (first) c.header.push_back(cell);
      else row.push_back(std::stod(cell));
    }
    if (!first) c.rows.push_back(row);
    first = false;
  }
  return c;
}

}  // namespace harness
