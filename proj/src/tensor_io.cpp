#include "sfeeg/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace sfeeg {

static_assert(std::endian::native == std::endian::little,
              "tensor container is little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[4] = {'S', 'F', 'E', 'M'};

void put_u32(std::ofstream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::ifstream& is, const char* what) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw CheckpointError(std::string("truncated tensor file reading ") + what);
    return v;
}

} // namespace

void write_tensor_file(const std::string& path, const TensorMap& tensors) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kTensorFileVersion);
    put_u32(os, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, blob] : tensors) {
        put_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(os, static_cast<std::uint32_t>(blob.dims.size()));
        for (std::uint32_t d : blob.dims) put_u32(os, d);
        if (blob.data.size() != blob.element_count())
            throw ShapeError("tensor '" + name + "': payload size does not match dims");
        os.write(reinterpret_cast<const char*>(blob.data.data()),
                 static_cast<std::streamsize>(blob.data.size() * sizeof(float)));
    }
    if (!os) throw IoError("write failed: " + path);
}

TensorMap read_tensor_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw CheckpointError("bad magic in tensor file: " + path);
    const std::uint32_t version = get_u32(is, "version");
    if (version != kTensorFileVersion)
        throw CheckpointError("unsupported tensor file version " + std::to_string(version));
    const std::uint32_t count = get_u32(is, "tensor count");
    TensorMap out;
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::uint32_t name_len = get_u32(is, "name length");
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        if (!is) throw CheckpointError("truncated tensor file reading name");
        TensorBlob blob;
        const std::uint32_t rank = get_u32(is, "rank");
        blob.dims.resize(rank);
        for (std::uint32_t r = 0; r < rank; ++r) blob.dims[r] = get_u32(is, "dims");
        blob.data.resize(blob.element_count());
        is.read(reinterpret_cast<char*>(blob.data.data()),
                static_cast<std::streamsize>(blob.data.size() * sizeof(float)));
        if (!is) throw CheckpointError("truncated tensor payload for '" + name + "'");
        out.emplace(std::move(name), std::move(blob));
    }
    return out;
}

} // namespace sfeeg
