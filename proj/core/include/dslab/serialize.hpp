#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "dslab/grid.hpp"

namespace dslab {

class SetIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The file does not start with the DSETv1 magic.
class BadMagicError : public SetIoError {
 public:
  using SetIoError::SetIoError;
};

/// The payload ends before ceil(nx*ny/8) bytes.
class TruncatedPayloadError : public SetIoError {
 public:
  using SetIoError::SetIoError;
};

/// Header fields are malformed, inconsistent with the extent, or the payload
/// disagrees with the declared extent (extra bytes, stray padding bits).
class HeaderMismatchError : public SetIoError {
 public:
  using SetIoError::SetIoError;
};

/// DSETv1: ASCII magic "DSETv1\n"; header lines dim=, m=, ox=, oy=, nx=,
/// ny=, enc=raw, in that order; a blank line; then ceil(nx*ny/8) payload
/// bytes, cells row-major (y outer), bit k of byte j = cell 8j+k, LSB first.
std::string encode_set(const DiscretizedSet& s);
DiscretizedSet decode_set(const std::string& bytes);

void save_set(const DiscretizedSet& s, const std::string& path);
DiscretizedSet load_set(const std::string& path);

}  // namespace dslab
