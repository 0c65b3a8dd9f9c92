#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nls/error.hpp"
#include "nls/io.hpp"

namespace nls {

namespace {

template <class T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T> && (sizeof(T) == 4 || sizeof(T) == 8));
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (pos_ + sizeof(T) > bytes_.size()) throw IoError(std::string("frame truncated in ") + what);
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }
  std::string_view take(std::size_t n) {
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_frame(const SpectralField& field, double t, const FrameMeta& meta) {
  if (field.space != Space::real) throw IoError("frames store real-space fields");
  const GridSpec& g = field.grid;
  std::string out;
  out.reserve(64 + 16 * field.size());
  out.append(kFrameMagic.data(), kFrameMagic.size());
  put(out, kFrameVersion);
  put(out, static_cast<std::uint32_t>(g.dims));
  for (int d = 0; d < g.dims; ++d) put(out, static_cast<std::uint32_t>(g.points[d]));
  for (int d = 0; d < g.dims; ++d) put(out, g.half_width[d]);
  put(out, meta.epsilon);
  put(out, meta.p);
  put(out, meta.mass);
  put(out, t);
  for (const auto& v : field.values) {
    put(out, v.real());
    put(out, v.imag());
  }
  return out;
}

FrameData decode_frame(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kFrameMagic.data(), 4) != 0) {
    throw IoError("bad magic: not an NLSF frame");
  }
  ByteReader in(bytes.substr(4));
  const auto version = in.get<std::uint32_t>("version");
  if (version != kFrameVersion) {
    throw IoError("frame version mismatch: file has " + std::to_string(version) + ", reader expects " +
                  std::to_string(kFrameVersion));
  }
  const auto dims = in.get<std::uint32_t>("dims");
  if (dims < 1 || dims > kMaxDims) throw IoError("frame header has invalid dims");
  std::array<std::size_t, kMaxDims> points{};
  std::array<double, kMaxDims> widths{};
  for (std::uint32_t d = 0; d < dims; ++d) points[d] = in.get<std::uint32_t>("point counts");
  for (std::uint32_t d = 0; d < dims; ++d) widths[d] = in.get<double>("half widths");
  FrameData out;
  out.meta.epsilon = in.get<double>("epsilon");
  out.meta.p = in.get<double>("p");
  out.meta.mass = in.get<double>("mass");
  out.t = in.get<double>("t");
  GridSpec grid;
  try {
    grid = make_grid(static_cast<int>(dims), std::span(widths.data(), dims), std::span(points.data(), dims));
  } catch (const ConfigError& e) {
    throw IoError(std::string("frame header describes an invalid grid: ") + e.what());
  }
  if (in.remaining() != 16 * grid.size()) {
    std::ostringstream msg;
    msg << "payload length mismatch: expected " << 16 * grid.size() << " bytes, found "
        << in.remaining();
    throw IoError(msg.str());
  }
  out.field = SpectralField(grid, Space::real);
  for (auto& v : out.field.values) {
    const double re = in.get<double>("payload");
    const double im = in.get<double>("payload");
    v = Complex{re, im};
  }
  return out;
}

void write_frame(const SpectralField& field, double t, const FrameMeta& meta,
                 const std::filesystem::path& path) {
  const std::string bytes = encode_frame(field, t, meta);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

FrameData read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return decode_frame(buf.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_diagnostics(const DiagnosticsSeries& series, std::ostream& out) {
  if (series.rows.empty()) throw IoError("diagnostics series is empty");
  const int n = series.params.dims;
  out << "t,mass,energy_full,h_eps_error";
  for (int d = 1; d <= n; ++d) out << ",com_" << d;
  for (int d = 1; d <= n; ++d) out << ",newton_" << d;
  out << '\n' << std::setprecision(17);
  for (const auto& row : series.rows) {
    out << row.t << ',' << row.mass << ',' << row.energy_full << ',' << row.h_eps_error;
    for (int d = 0; d < n; ++d) out << ',' << row.com[d];
    for (int d = 0; d < n; ++d) out << ',' << row.newton_x[d];
    out << '\n';
  }
}

void write_diagnostics(const DiagnosticsSeries& series, const std::filesystem::path& path) {
  if (series.rows.empty()) throw IoError("diagnostics series is empty");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_diagnostics(series, out);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace nls
