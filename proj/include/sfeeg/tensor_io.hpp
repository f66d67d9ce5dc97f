#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfeeg/errors.hpp"

namespace sfeeg {

// One entry of the binary tensor container.
struct TensorBlob {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (std::uint32_t d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }
};

using TensorMap = std::map<std::string, TensorBlob>;

// Little-endian binary container:
//   magic "SFEM", version u32, tensor count u32,
//   per tensor: name length u32 + name bytes, rank u32, dims u32 each,
//   payload as IEEE-754 32-bit floats.
// Tensors are written in name order, so identical maps produce identical bytes.
inline constexpr std::uint32_t kTensorFileVersion = 1;

void write_tensor_file(const std::string& path, const TensorMap& tensors);
TensorMap read_tensor_file(const std::string& path);

} // namespace sfeeg
