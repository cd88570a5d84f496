#include "dslab/serialize.hpp"

#include <fstream>
#include <sstream>

namespace dslab {

namespace {

constexpr const char* kMagic = "DSETv1\n";

std::int64_t parse_field(const std::string& line, const char* key) {
  const std::string prefix = std::string(key) + "=";
  if (line.rfind(prefix, 0) != 0)
    throw HeaderMismatchError("DSETv1: expected header line '" + prefix + "...'");
  const std::string value = line.substr(prefix.size());
  if (value.empty()) throw HeaderMismatchError("DSETv1: empty header value for " + prefix);
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw HeaderMismatchError("DSETv1: non-numeric header value for " + prefix);
  }
  if (used != value.size())
    throw HeaderMismatchError("DSETv1: trailing junk in header value for " + prefix);
  return v;
}

}  // namespace

std::string encode_set(const DiscretizedSet& s) {
  const GridSpec& g = s.grid();
  std::ostringstream out;
  out << kMagic << "dim=" << g.dim << "\nm=" << g.m << "\nox=" << g.ox
      << "\noy=" << g.oy << "\nnx=" << g.nx << "\nny=" << g.ny << "\nenc=raw\n\n";
  const std::int64_t bits = g.cells();
  const std::int64_t bytes = (bits + 7) / 8;
  const auto& words = s.words();
  for (std::int64_t j = 0; j < bytes; ++j) {
    const std::uint64_t w = words[static_cast<std::size_t>(j / 8)];
    out.put(static_cast<char>((w >> ((j % 8) * 8)) & 0xff));
  }
  return out.str();
}

DiscretizedSet decode_set(const std::string& bytes) {
  const std::size_t magic_len = 7;
  if (bytes.size() < magic_len || bytes.compare(0, magic_len, kMagic) != 0)
    throw BadMagicError("DSETv1: bad magic");

  std::size_t pos = magic_len;
  auto next_line = [&]() {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos)
      throw TruncatedPayloadError("DSETv1: header ends prematurely");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  GridSpec g;
  g.dim = static_cast<int>(parse_field(next_line(), "dim"));
  g.m = static_cast<int>(parse_field(next_line(), "m"));
  g.ox = parse_field(next_line(), "ox");
  g.oy = parse_field(next_line(), "oy");
  g.nx = parse_field(next_line(), "nx");
  g.ny = parse_field(next_line(), "ny");
  if (next_line() != "enc=raw") throw HeaderMismatchError("DSETv1: unsupported encoding");
  if (next_line() != "") throw HeaderMismatchError("DSETv1: missing blank separator");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw HeaderMismatchError(std::string("DSETv1: invalid header: ") + e.what());
  }

  const std::int64_t bits = g.cells();
  const std::int64_t nbytes = (bits + 7) / 8;
  const std::int64_t available = static_cast<std::int64_t>(bytes.size() - pos);
  if (available < nbytes) throw TruncatedPayloadError("DSETv1: payload truncated");
  if (available > nbytes)
    throw HeaderMismatchError("DSETv1: payload longer than the declared extent");

  std::vector<std::uint64_t> words(static_cast<std::size_t>((bits + 63) / 64), 0);
  for (std::int64_t j = 0; j < nbytes; ++j) {
    const auto byte = static_cast<std::uint8_t>(bytes[pos + static_cast<std::size_t>(j)]);
    words[static_cast<std::size_t>(j / 8)] |= static_cast<std::uint64_t>(byte)
                                              << ((j % 8) * 8);
  }
  if (bits % 8 != 0) {
    const auto last = static_cast<std::uint8_t>(bytes[pos + static_cast<std::size_t>(nbytes - 1)]);
    if (last >> (bits % 8))
      throw HeaderMismatchError("DSETv1: payload bits set beyond the extent");
  }
  try {
    return DiscretizedSet(g, std::move(words));
  } catch (const std::invalid_argument& e) {
    throw HeaderMismatchError(std::string("DSETv1: ") + e.what());
  }
}

void save_set(const DiscretizedSet& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SetIoError("cannot open for writing: " + path);
  const std::string bytes = encode_set(s);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw SetIoError("write failed: " + path);
}

DiscretizedSet load_set(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SetIoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return decode_set(buf.str());
}

}  // namespace dslab
