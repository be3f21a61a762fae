#include "garchcp/app.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace garchcp::app {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(std::string_view(line).substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return fields;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

bool valid_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const int y = std::stoi(s.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name,
                         const std::string& source) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError(where(source, 1) + "no column named '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");
  return in;
}

}  // namespace

PriceSeries parse_price_csv(std::istream& in, const std::string& source, const CsvColumns& columns) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const auto header = split(line);
  const std::size_t date_col = column_index(header, columns.date, source);
  const std::size_t price_col = column_index(header, columns.price, source);

  PriceSeries out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    const std::string date = date_col < fields.size() ? fields[date_col] : "";
    const std::string price = price_col < fields.size() ? fields[price_col] : "";
    if (!valid_iso_date(date)) {
      throw DataError(where(source, lineno) + "malformed date '" + date + "' (expected YYYY-MM-DD)");
    }
    if (price.empty()) throw DataError(where(source, lineno) + "missing price");
    const auto value = parse_double(price);
    if (!value || !std::isfinite(*value)) {
      throw DataError(where(source, lineno) + "malformed price '" + price + "'");
    }
    if (!(*value > 0.0)) throw DataError(where(source, lineno) + "price must be > 0, got " + price);
    if (!out.dates.empty()) {
      if (date == out.dates.back()) throw DataError(where(source, lineno) + "duplicate date " + date);
      if (date < out.dates.back()) {
        throw DataError(where(source, lineno) + "date " + date + " is not after " + out.dates.back());
      }
    }
    out.dates.push_back(date);
    out.prices.push_back(*value);
  }
  return out;
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvColumns& columns) {
  auto in = open(path);
  return parse_price_csv(in, path.string(), columns);
}

std::vector<double> load_column(const std::filesystem::path& path, const std::string& column) {
  auto in = open(path);
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const std::size_t col = column_index(split(line), column, source);
  std::vector<double> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    const std::string text = col < fields.size() ? fields[col] : "";
    const auto value = parse_double(text);
    if (!value || !std::isfinite(*value)) {
      throw DataError(where(source, lineno) + "malformed value '" + text + "' in column " + column);
    }
    out.push_back(*value);
  }
  return out;
}

std::vector<double> log_returns(const PriceSeries& prices) {
  const auto& s = prices.prices;
  if (s.size() < 2) throw std::invalid_argument("log_returns: need at least 2 prices");
  std::vector<double> r(s.size() - 1);
  for (std::size_t t = 1; t < s.size(); ++t) r[t - 1] = 100.0 * (std::log(s[t]) - std::log(s[t - 1]));
  return r;
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

}  // namespace garchcp::app
