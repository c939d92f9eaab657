#include "curvlab/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

constexpr char kMagic[8] = {'C', 'V', 'L', 'F', 'I', 'E', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw FormatError("bad number '" + s + "'");
  return v;
}

FieldData::Kind kind_from(const std::string& s) {
  if (s == "scalar") return FieldData::Kind::Scalar;
  if (s == "tensor2") return FieldData::Kind::Tensor2;
  if (s == "metric") return FieldData::Kind::Metric;
  throw FormatError("unknown field kind '" + s + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

template <class T>
void put(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    out.write(b, sizeof(T));
  } else {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <class T>
T get(std::istream& in) {
  char b[sizeof(T)];
  if (!in.read(b, sizeof(T))) throw FormatError("truncated binary field");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

void check_shape(const FieldData& d) {
  if (d.values.size() != d.names.size() * d.grid.node_count())
    throw FormatError("field value count does not match its shape");
}

}  // namespace

std::string to_string(FieldData::Kind kind) {
  switch (kind) {
    case FieldData::Kind::Scalar: return "scalar";
    case FieldData::Kind::Tensor2: return "tensor2";
    case FieldData::Kind::Metric: return "metric";
  }
  return "unknown";
}

FieldData to_data(const ScalarField& f, const std::string& name) {
  FieldData d{f.grid(), FieldData::Kind::Scalar, {name}, {}};
  d.values.assign(f.values().begin(), f.values().end());
  return d;
}

FieldData to_data(const TensorField2& T, const std::string& prefix) {
  FieldData d{T.grid(), FieldData::Kind::Tensor2, {}, {}};
  const int n = T.dimension();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      d.names.push_back(prefix + std::to_string(i) + std::to_string(j));
      const auto c = T.component(i, j);
      d.values.insert(d.values.end(), c.begin(), c.end());
    }
  return d;
}

FieldData to_data(const MetricField& g) {
  FieldData d = to_data(g.components(), "g");
  d.kind = FieldData::Kind::Metric;
  return d;
}

ScalarField scalar_from(const FieldData& d) {
  check_shape(d);
  if (d.components() != 1) throw FormatError("expected a scalar field");
  return ScalarField(d.grid, d.values);
}

TensorField2 tensor_from(const FieldData& d) {
  check_shape(d);
  const int n = d.grid.dimension();
  if (d.components() != TensorField2::packed_count(n))
    throw FormatError("expected " + std::to_string(TensorField2::packed_count(n)) +
                      " tensor components");
  TensorField2 T(d.grid);
  std::copy(d.values.begin(), d.values.end(), T.raw().begin());
  return T;
}

MetricField metric_from(const FieldData& d) { return MetricField(tensor_from(d)); }

void write_csv(std::ostream& out, const FieldData& d) {
  check_shape(d);
  const Grid& g = d.grid;
  const int n = g.dimension();
  out << "# curvlab-field kind=" << to_string(d.kind) << " n=" << n << " N=" << g.points() << " L=";
  for (int a = 0; a < n; ++a) out << (a ? "," : "") << fmt(g.length(a));
  out << "\n";
  for (int a = 0; a < n; ++a) out << "x" << a << ",";
  for (int c = 0; c < d.components(); ++c) out << (c ? "," : "") << d.names[static_cast<std::size_t>(c)];
  out << "\n";
  const std::size_t nodes = g.node_count();
  for (std::size_t p = 0; p < nodes; ++p) {
    for (int a = 0; a < n; ++a) out << fmt(g.coordinate(p, a)) << ",";
    for (int c = 0; c < d.components(); ++c)
      out << (c ? "," : "") << fmt(d.values[static_cast<std::size_t>(c) * nodes + p]);
    out << "\n";
  }
}

FieldData read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# curvlab-field", 0) != 0)
    throw FormatError("missing '# curvlab-field' header line");
  std::string kind;
  int n = 0;
  int N = 0;
  std::vector<double> lengths;
  std::istringstream hs(line.substr(15));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("bad header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "kind")
      kind = val;
    else if (key == "n")
      n = static_cast<int>(parse_double(val));
    else if (key == "N")
      N = static_cast<int>(parse_double(val));
    else if (key == "L")
      for (const auto& s : split(val, ',')) lengths.push_back(parse_double(s));
  }
  FieldData d{Grid(n, N, lengths), kind_from(kind), {}, {}};
  if (!std::getline(in, line)) throw FormatError("missing column header row");
  const auto cols = split(line, ',');
  if (static_cast<int>(cols.size()) <= n) throw FormatError("no component columns");
  d.names.assign(cols.begin() + n, cols.end());
  const std::size_t nodes = d.grid.node_count();
  const std::size_t nc = d.names.size();
  d.values.assign(nc * nodes, 0.0);
  for (std::size_t p = 0; p < nodes; ++p) {
    if (!std::getline(in, line)) throw FormatError("CSV ends before all nodes were read");
    const auto cells = split(line, ',');
    if (cells.size() != cols.size()) throw FormatError("wrong column count in row " + std::to_string(p));
    for (std::size_t c = 0; c < nc; ++c) d.values[c * nodes + p] = parse_double(cells[n + c]);
  }
  return d;
}

void write_binary(std::ostream& out, const FieldData& d) {
  check_shape(d);
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.grid.dimension()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.grid.points()));
  for (int a = 0; a < d.grid.dimension(); ++a) put<double>(out, d.grid.length(a));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(d.components()));
  for (const auto& name : d.names) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (double v : d.values) put<double>(out, v);
}

FieldData read_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw FormatError("not a curvlab binary field");
  if (get<std::uint32_t>(in) != kVersion) throw FormatError("unsupported binary field version");
  const auto kind = get<std::uint32_t>(in);
  if (kind > 2) throw FormatError("unknown field kind code");
  const int n = static_cast<int>(get<std::uint32_t>(in));
  const int N = static_cast<int>(get<std::uint32_t>(in));
  if (n < 2 || n > 16) throw FormatError("implausible dimension in binary field");
  std::vector<double> lengths;
  for (int a = 0; a < n; ++a) lengths.push_back(get<double>(in));
  FieldData d{Grid(n, N, lengths), static_cast<FieldData::Kind>(kind), {}, {}};
  const auto nc = get<std::uint32_t>(in);
  if (nc > 4096) throw FormatError("implausible component count");
  for (std::uint32_t c = 0; c < nc; ++c) {
    const auto len = get<std::uint32_t>(in);
    if (len > 256) throw FormatError("implausible component name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw FormatError("truncated component name");
    d.names.push_back(name);
  }
  d.values.resize(nc * d.grid.node_count());
  for (double& v : d.values) v = get<double>(in);
  return d;
}

namespace {
bool is_binary_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0;
}
}  // namespace

void save_field(const std::string& path, const FieldData& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  if (is_binary_path(path))
    write_binary(out, d);
  else
    write_csv(out, d);
}

FieldData load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return is_binary_path(path) ? read_binary(in) : read_csv(in);
}

}  // namespace curvlab
