#include "patchcert/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace patchcert {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << origin;
  if (line > 0) msg << ":" << line;
  msg << ": " << what;
  throw FormatError(msg.str());
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

// Strict ASCII decimal fields separated by single spaces.
std::vector<long> parse_ints(const std::string& line, const std::string& origin, std::size_t lineno) {
  std::vector<long> out;
  if (line.empty()) fail(origin, lineno, "empty line");
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(' ', pos);
    if (end == std::string::npos) end = line.size();
    const std::string_view field(line.data() + pos, end - pos);
    long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
      fail(origin, lineno, "expected a non-negative decimal integer, got '" + std::string(field) + "'");
    }
    out.push_back(value);
    if (end == line.size()) break;
    pos = end + 1;
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Sample parse_sgf(const std::string& text, const std::string& origin) {
  if (text.empty()) fail(origin, 0, "empty file");
  if (text.back() != '\n') fail(origin, 0, "missing trailing newline");
  const auto lines = split_lines(text);

  const auto header = parse_ints(lines[0], origin, 1);
  if (header.size() != 3) fail(origin, 1, "header must be 'w h A'");
  const long w = header[0], h = header[1], alphabet = header[2];
  if (w <= 0 || h <= 0) fail(origin, 1, "width and height must be positive");
  if (alphabet <= 0 || alphabet > 255) fail(origin, 1, "alphabet size must be in [1, 255]");
  if (lines.size() != static_cast<std::size_t>(h) + 1) {
    fail(origin, 0, "expected " + std::to_string(h) + " pixel rows, found " +
                        std::to_string(lines.size() - 1));
  }

  std::vector<Pixel> pixels;
  pixels.reserve(static_cast<std::size_t>(w * h));
  for (long row = 0; row < h; ++row) {
    const std::size_t lineno = static_cast<std::size_t>(row) + 2;
    const auto values = parse_ints(lines[lineno - 1], origin, lineno);
    if (values.size() != static_cast<std::size_t>(w)) {
      fail(origin, lineno, "expected " + std::to_string(w) + " pixels, got " +
                               std::to_string(values.size()));
    }
    for (long v : values) {
      if (v > alphabet) {
        fail(origin, lineno, "pixel value " + std::to_string(v) + " exceeds alphabet " +
                                 std::to_string(alphabet));
      }
      pixels.push_back(static_cast<Pixel>(v));
    }
  }
  return Sample(static_cast<int>(w), static_cast<int>(h), static_cast<Pixel>(alphabet), pixels);
}

Sample read_sgf(const fs::path& path) { return parse_sgf(read_file(path), path.string()); }

std::string format_sgf(const Sample& x) {
  std::ostringstream out;
  out << x.width() << ' ' << x.height() << ' ' << static_cast<int>(x.alphabet()) << '\n';
  out << to_string(x);
  return out.str();
}

void write_sgf(const fs::path& path, const Sample& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string() + ": cannot write");
  out << format_sgf(x);
}

Dataset load_dataset(const fs::path& dir, const DatasetOptions& options) {
  if (!fs::is_directory(dir)) throw FormatError(dir.string() + ": not a dataset directory");
  const fs::path labels_path = dir / "labels.csv";
  if (!fs::exists(labels_path)) throw FormatError(labels_path.string() + ": missing labels file");

  const std::string origin = labels_path.string();
  std::map<std::string, Label> labels;
  const auto lines = split_lines(read_file(labels_path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim_cr(lines[i]);
    const std::size_t lineno = i + 1;
    if (i == 0) {
      if (line != "file,label") fail(origin, lineno, "header must be 'file,label'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail(origin, lineno, "expected 'file,label'");
    }
    const std::string file = line.substr(0, comma);
    const std::string label_text = line.substr(comma + 1);
    Label label = 0;
    auto [ptr, ec] = std::from_chars(label_text.data(), label_text.data() + label_text.size(), label);
    if (file.empty() || label_text.empty() || ec != std::errc() ||
        ptr != label_text.data() + label_text.size()) {
      fail(origin, lineno, "malformed row '" + line + "'");
    }
    if (!labels.emplace(file, label).second) fail(origin, lineno, "duplicate row for " + file);
    if (!fs::exists(dir / file)) fail(origin, lineno, "sample file " + file + " does not exist");
  }

  std::set<std::string> on_disk;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".sgf") {
      on_disk.insert(fs::relative(entry.path(), dir).generic_string());
    }
  }
  for (const auto& file : on_disk) {
    if (!labels.contains(file)) fail(origin, 0, "missing label for sample file " + file);
  }

  Dataset dataset;
  for (const auto& [file, label] : labels) {  // std::map: lexicographic by file name
    Sample x = read_sgf(dir / file);
    if (!dataset.empty()) {
      const Sample& first = dataset.front().sample;
      if (x.width() != first.width() || x.height() != first.height() ||
          x.alphabet() != first.alphabet()) {
        fail((dir / file).string(), 1, "frame or alphabet differs from " + dataset.front().id);
      }
    }
    if (!options.allow_sentinel && x.contains_sentinel()) {
      fail((dir / file).string(), 0, "benign sample contains the sentinel value 0");
    }
    dataset.push_back({file, std::move(x), label});
  }
  return dataset;
}

void save_dataset(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  std::ofstream labels(dir / "labels.csv", std::ios::binary);
  if (!labels) throw FormatError((dir / "labels.csv").string() + ": cannot write");
  labels << "file,label\n";
  for (const auto& item : dataset) {
    write_sgf(dir / item.id, item.sample);
    labels << item.id << ',' << item.label << '\n';
  }
}

}  // namespace patchcert
