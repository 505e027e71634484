#include "streamon/diagnostics.hpp"

#include <sstream>

namespace streamon {

SourceFile::SourceFile(std::string path, std::string text)
    : path_(std::move(path)), text_(std::move(text)) {
  line_starts_.push_back(0);
  for (size_t i = 0; i < text_.size(); ++i)
    if (text_[i] == '\n') line_starts_.push_back(i + 1);
}

void SourceFile::line_col(size_t offset, size_t& line, size_t& col) const {
  size_t lo = 0, hi = line_starts_.size();
  while (lo + 1 < hi) {
    size_t mid = (lo + hi) / 2;
    if (line_starts_[mid] <= offset) lo = mid; else hi = mid;
  }
  line = lo + 1;
  col = offset - line_starts_[lo] + 1;
}

std::string SourceFile::render(const Diagnostic& d) const {
  size_t line = 1, col = 1;
  line_col(d.span.begin, line, col);
  std::ostringstream os;
  os << path_ << ':' << line << ':' << col << ": "
     << (d.severity == Severity::Error ? "error" : "warning")
     << '[' << d.code << "]: " << d.message;
  return os.str();
}

std::string SourceFile::render_all(const DiagnosticList& list) const {
  std::string out;
  for (const auto& d : list.items()) {
    out += render(d);
    out += '\n';
  }
  return out;
}

}  // namespace streamon
