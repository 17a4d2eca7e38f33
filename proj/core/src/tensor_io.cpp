#include "flowanchor/tensor_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "flowanchor/error.hpp"

namespace flowanchor {

namespace {

constexpr std::size_t kMaxHeaderBytes = 4096;
constexpr std::size_t kMaxRank = 16;
// 2^40 floats is 4 TiB; anything larger is certainly a corrupt header.
constexpr std::size_t kMaxElements = std::size_t{1} << 40;

using Kind = FormatError::Kind;

std::size_t parse_extent(std::string_view token, std::size_t position) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw FormatError(Kind::kDimOverflow,
                      "FATN header: extent " + std::to_string(position) +
                          " overflows");
  }
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw FormatError(Kind::kMalformedHeader,
                      "FATN header: token '" + std::string(token) +
                          "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(value);
}

std::uint32_t to_little(std::uint32_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((bits & 0xFFU) << 24) | ((bits & 0xFF00U) << 8) |
           ((bits >> 8) & 0xFF00U) | (bits >> 24);
  }
  return bits;
}

}  // namespace

RawTensor read_fatn(std::istream& in) {
  std::string header;
  char ch = 0;
  bool terminated = false;
  while (header.size() < kMaxHeaderBytes && in.get(ch)) {
    if (ch == '\n') {
      terminated = true;
      break;
    }
    header.push_back(ch);
  }
  if (!terminated) {
    if (header.size() >= kMaxHeaderBytes) {
      throw FormatError(Kind::kMalformedHeader, "FATN header line too long");
    }
    throw FormatError(Kind::kTruncatedHeader, "truncated header");
  }

  std::vector<std::string_view> tokens;
  std::string_view rest(header);
  while (!rest.empty()) {
    const auto start = rest.find_first_not_of(' ');
    if (start == std::string_view::npos) break;
    rest.remove_prefix(start);
    const auto end = rest.find(' ');
    tokens.push_back(rest.substr(0, end));
    if (end == std::string_view::npos) break;
    rest.remove_prefix(end);
  }
  if (tokens.empty() || tokens[0] != "FATN") {
    throw FormatError(Kind::kMalformedHeader, "FATN header: missing magic");
  }
  if (tokens.size() < 2) {
    throw FormatError(Kind::kMalformedHeader, "FATN header: missing rank");
  }
  const std::size_t rank = parse_extent(tokens[1], 0);
  if (rank == 0 || rank > kMaxRank) {
    throw FormatError(Kind::kMalformedHeader,
                      "FATN header: unsupported rank " + std::to_string(rank));
  }
  if (tokens.size() - 2 != rank) {
    throw FormatError(Kind::kMalformedHeader,
                      "FATN header declares " + std::to_string(rank) +
                          " dims but " + std::to_string(tokens.size() - 2) +
                          " provided");
  }

  RawTensor out;
  out.dims.reserve(rank);
  std::size_t total = 1;
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t extent = parse_extent(tokens[k + 2], k + 1);
    if (extent == 0) {
      throw FormatError(Kind::kZeroSize,
                        "FATN header: extent " + std::to_string(k + 1) + " is zero");
    }
    if (total > kMaxElements / extent) {
      throw FormatError(Kind::kDimOverflow, "FATN header: element count overflows");
    }
    total *= extent;
    out.dims.push_back(extent);
  }

  std::vector<std::uint32_t> words(total);
  in.read(reinterpret_cast<char*>(words.data()),
          static_cast<std::streamsize>(total * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != total * sizeof(std::uint32_t)) {
    throw FormatError(Kind::kTruncatedPayload,
                      "truncated payload: expected " + std::to_string(total) +
                          " float32 values");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(Kind::kTrailingData, "trailing bytes after FATN payload");
  }
  out.data.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    out.data[i] = std::bit_cast<float>(to_little(words[i]));
  }
  return out;
}

RawTensor read_fatn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(Kind::kIo, "cannot open " + path.string());
  }
  return read_fatn(in);
}

void write_fatn(std::ostream& out, const RawTensor& tensor) {
  std::size_t total = 1;
  for (std::size_t d : tensor.dims) total *= d;
  if (tensor.dims.empty() || total != tensor.data.size()) {
    throw ShapeError("write_fatn: dims do not match payload size");
  }
  std::string header = "FATN " + std::to_string(tensor.dims.size());
  for (std::size_t d : tensor.dims) header += " " + std::to_string(d);
  header += '\n';
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::vector<std::uint32_t> words(tensor.data.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    words[i] = to_little(std::bit_cast<std::uint32_t>(tensor.data[i]));
  }
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw FormatError(Kind::kIo, "write_fatn: stream write failed");
}

void write_fatn(const std::filesystem::path& path, const RawTensor& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(Kind::kIo, "cannot open " + path.string() + " for writing");
  write_fatn(out, tensor);
}

RawTensor to_raw(const VideoLatent& tensor) {
  const Shape5& d = tensor.dims();
  return RawTensor{{d.batch, d.channels, d.frames, d.height, d.width},
                   {tensor.data().begin(), tensor.data().end()}};
}

VideoLatent from_raw(const RawTensor& raw) {
  if (raw.dims.size() != 5) {
    throw FormatError(Kind::kMalformedHeader,
                      "expected a rank-5 (B,C,F,H,W) tensor, got rank " +
                          std::to_string(raw.dims.size()));
  }
  return VideoLatent(Shape5{raw.dims[0], raw.dims[1], raw.dims[2], raw.dims[3],
                            raw.dims[4]},
                     raw.data);
}

VideoLatent load_tensor(const std::filesystem::path& path) {
  return from_raw(read_fatn(path));
}

void save_tensor(const VideoLatent& tensor, const std::filesystem::path& path) {
  write_fatn(path, to_raw(tensor));
}

}  // namespace flowanchor
