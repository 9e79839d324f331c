#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pcx/driver.hpp"

namespace pcx {

// JSON-lines layout: a header line {"type":"header",...} with the config and
// constants, one {"type":"step",...} line per StepReport, and a footer line
// {"type":"footer",...} with the termination reason and final point.

std::string header_line(const Trace& trace);
std::string step_line(const StepReport& report);
std::string footer_line(const Trace& trace, bool include_wall_time = true);

/// Whole trace as JSON lines. Without wall time the text is a pure function
/// of (problem, x0, config).
std::string serialize_trace(const Trace& trace, bool include_wall_time = true);
void write_trace(std::ostream& out, const Trace& trace);

/// Throws ParseError naming the 1-based line number of the malformed line.
Trace read_trace(std::istream& in);

/// Streams lines to `out`, flushing after every step.
class JsonlTraceSink : public TraceSink {
 public:
  explicit JsonlTraceSink(std::ostream& out) : out_(out) {}
  void begin(const Trace& trace) override;
  void step(const StepReport& report) override;
  void end(const Trace& trace) override;

 private:
  std::ostream& out_;
};

/// CSV with header
/// instance,iterations,accepted_steps,total_rejections,final_prox_grad_norm,final_f_gap,wall_time,termination
std::string export_summary(const std::vector<Trace>& traces);

}  // namespace pcx
