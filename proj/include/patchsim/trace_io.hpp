#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "patchsim/errors.hpp"
#include "patchsim/trace.hpp"

// Line-delimited trace wire format:
//
//   CPSTRACE 1 <test-id> <version>
//   S <id>          statement
//   E <method>      method enter
//   X <method>      method exit
//   U <method>      exit by exception unwinding
//   END <0|1>       end of test, crashed flag
//
// A zero-length file is accepted as an empty trace.

namespace patchsim {

struct TraceFile {
  std::string test_id;
  std::string version;
  std::vector<TraceEvent> events;

  bool operator==(const TraceFile&) const = default;
};

namespace detail {

inline bool has_space(std::string_view s) {
  return s.find_first_of(" \t\r\n") != std::string_view::npos;
}

inline void check_token(std::string_view what, std::string_view s) {
  if (s.empty() || has_space(s)) {
    throw Error("trace " + std::string(what) + " must be a non-empty token without whitespace: '" +
                std::string(s) + "'");
  }
}

}  // namespace detail

inline void write_trace(std::ostream& os, const TraceFile& trace) {
  detail::check_token("test id", trace.test_id);
  detail::check_token("version", trace.version);
  os << "CPSTRACE 1 " << trace.test_id << ' ' << trace.version << '\n';
  for (const auto& ev : trace.events) {
    switch (ev.kind) {
      case EventKind::statement: os << "S " << ev.statement.value << '\n'; break;
      case EventKind::enter: detail::check_token("method", ev.method); os << "E " << ev.method << '\n'; break;
      case EventKind::exit: detail::check_token("method", ev.method); os << "X " << ev.method << '\n'; break;
      case EventKind::unwind: detail::check_token("method", ev.method); os << "U " << ev.method << '\n'; break;
      case EventKind::end: os << "END " << (ev.crashed ? 1 : 0) << '\n'; break;
    }
  }
}

inline TraceFile read_trace(std::istream& is) {
  TraceFile out;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;

  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view rest(line);
    auto sp = rest.find(' ');
    std::string_view tag = rest.substr(0, sp);
    std::string_view arg = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);

    if (!have_header) {
      std::istringstream hs(line);
      std::string magic, test_id, version, extra;
      int fmt = 0;
      if (!(hs >> magic >> fmt >> test_id >> version) || magic != "CPSTRACE" || (hs >> extra)) {
        throw FormatError(lineno, "expected header 'CPSTRACE 1 <test-id> <version>'");
      }
      if (fmt != 1) throw FormatError(lineno, "unsupported trace format version " + std::to_string(fmt));
      out.test_id = std::move(test_id);
      out.version = std::move(version);
      have_header = true;
      continue;
    }

    if (tag == "S") {
      std::uint32_t id = 0;
      auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), id);
      if (arg.empty() || ec != std::errc{} || p != arg.data() + arg.size()) {
        throw FormatError(lineno, "bad statement id '" + std::string(arg) + "'");
      }
      out.events.push_back(TraceEvent::stmt(id));
    } else if (tag == "E" || tag == "X" || tag == "U") {
      if (arg.empty() || detail::has_space(arg)) {
        throw FormatError(lineno, "bad method name '" + std::string(arg) + "'");
      }
      std::string m(arg);
      out.events.push_back(tag == "E"   ? TraceEvent::enter(std::move(m))
                           : tag == "X" ? TraceEvent::exit(std::move(m))
                                        : TraceEvent::unwind(std::move(m)));
    } else if (tag == "END") {
      if (arg != "0" && arg != "1") throw FormatError(lineno, "END flag must be 0 or 1");
      out.events.push_back(TraceEvent::end(arg == "1"));
    } else {
      throw FormatError(lineno, "unknown event kind '" + std::string(tag) + "'");
    }
  }
  return out;
}

inline void write_trace_file(const TraceFile& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  write_trace(os, trace);
  if (!os) throw Error("write to '" + path.string() + "' failed");
}

inline TraceFile read_trace_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingTrace("cannot open trace '" + path.string() + "'");
  return read_trace(is);
}

}  // namespace patchsim
