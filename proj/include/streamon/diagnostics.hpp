#ifndef STREAMON_DIAGNOSTICS_HPP
#define STREAMON_DIAGNOSTICS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace streamon {

// Byte range into the specification source. end is exclusive.
struct SourceSpan {
  size_t begin = 0;
  size_t end = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // short identifier, stable per rejection class
  std::string message;
  SourceSpan span;
};

class DiagnosticList {
 public:
  void error(std::string code, std::string message, SourceSpan span) {
    items_.push_back({Severity::Error, std::move(code), std::move(message), span});
  }
  void warning(std::string code, std::string message, SourceSpan span) {
    items_.push_back({Severity::Warning, std::move(code), std::move(message), span});
  }

  bool has_errors() const {
    for (const auto& d : items_)
      if (d.severity == Severity::Error) return true;
    return false;
  }
  bool empty() const { return items_.empty(); }
  const std::vector<Diagnostic>& items() const { return items_; }

  bool has_code(const std::string& code) const {
    for (const auto& d : items_)
      if (d.code == code) return true;
    return false;
  }

  void append(const DiagnosticList& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
  }

 private:
  std::vector<Diagnostic> items_;
};

// Maps byte offsets back to 1-based line/column positions and renders
// diagnostics in the `file:line:col: error[code]: message` format.
class SourceFile {
 public:
  SourceFile() = default;
  SourceFile(std::string path, std::string text);

  const std::string& text() const { return text_; }
  const std::string& path() const { return path_; }

  void line_col(size_t offset, size_t& line, size_t& col) const;
  std::string render(const Diagnostic& d) const;
  std::string render_all(const DiagnosticList& list) const;

 private:
  std::string path_;
  std::string text_;
  std::vector<size_t> line_starts_;
};

}  // namespace streamon

#endif
