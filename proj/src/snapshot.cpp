#include "msdc/snapshot.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace msdc {
namespace {

constexpr char kMagic[4] = {'M', 'S', 'D', 'C'};
// Generous bound on per-dimension size so a corrupted header cannot request
// a huge allocation before the checksum is verified.
constexpr std::uint32_t kMaxDimension = 1u << 20;

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    template <typename T>
    void le(T value) {
        static_assert(std::is_unsigned_v<T>);
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
        }
    }
    void u8(std::uint8_t v) { le(v); }
    void u16(std::uint16_t v) { le(v); }
    void u32(std::uint32_t v) { le(v); }
    void u64(std::uint64_t v) { le(v); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
    void string(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    void index_list(std::span<const std::uint32_t> xs) {
        u32(static_cast<std::uint32_t>(xs.size()));
        for (auto x : xs) u32(x);
    }
    std::vector<std::uint8_t>& buffer() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::span<const std::uint8_t> take(std::size_t n) {
        if (n > in_.size() - pos_) {
            throw SnapshotError(SnapshotFault::truncated, "snapshot truncated");
        }
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    template <typename T>
    T le() {
        auto s = take(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(T{s[i]} << (8 * i));
        return v;
    }
    std::uint8_t u8() { return le<std::uint8_t>(); }
    std::uint16_t u16() { return le<std::uint16_t>(); }
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
    std::string string() {
        const auto n = u32();
        auto s = take(n);
        return {reinterpret_cast<const char*>(s.data()), s.size()};
    }
    std::vector<std::uint32_t> index_list() {
        const auto n = u32();
        if (static_cast<std::size_t>(n) * 4 > remaining()) {
            throw SnapshotError(SnapshotFault::truncated, "snapshot truncated in index list");
        }
        std::vector<std::uint32_t> xs(n);
        for (auto& x : xs) x = u32();
        return xs;
    }
    [[nodiscard]] std::size_t position() const noexcept { return pos_; }
    [[nodiscard]] std::size_t remaining() const noexcept { return in_.size() - pos_; }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

std::string rng_state(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

[[noreturn]] void malformed(const std::string& what) {
    throw SnapshotError(SnapshotFault::malformed, "malformed snapshot: " + what);
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const MemoryModel& model) {
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u16(kSnapshotVersion);

    const auto& g = model.geometry();
    w.u32(g.input_width);
    w.u32(g.input_height);
    w.u32(g.num_active);
    w.u32(g.num_cms);
    w.u32(g.units_per_cm);

    const auto& p = model.params();
    w.f64(p.eta_max);
    w.f64(p.sigmoid_steepness);
    w.f64(p.sigmoid_midpoint);
    w.f64(p.g_floor);
    w.f64(p.g_exponent);

    w.u64(model.stored_count());
    w.string(rng_state(model.rng()));

    w.u32(model.weights().quantum());
    const auto packed = model.weights().pack();
    w.bytes(packed.data(), packed.size());

    if (const auto* ledger = model.ledger()) {
        w.u8(1);
        w.u32(static_cast<std::uint32_t>(ledger->size()));
        for (const auto& e : *ledger) {
            w.string(e.label);
            w.index_list(e.input.active());
            w.index_list(e.code.winners());
        }
    } else {
        w.u8(0);
    }

    w.u32(crc32_of(w.buffer()));
    return std::move(w.buffer());
}

MemoryModel decode_snapshot(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.take(sizeof kMagic);
    if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) {
        throw SnapshotError(SnapshotFault::bad_magic, "not an MSDC snapshot (bad magic)");
    }
    const auto version = r.u16();
    if (version != kSnapshotVersion) {
        throw SnapshotError(SnapshotFault::version_mismatch,
                            "unsupported snapshot version " + std::to_string(version) +
                                " (expected " + std::to_string(kSnapshotVersion) + ")");
    }

    ModelGeometry g;
    g.input_width = r.u32();
    g.input_height = r.u32();
    g.num_active = r.u32();
    g.num_cms = r.u32();
    g.units_per_cm = r.u32();
    for (auto d : {g.input_width, g.input_height, g.num_cms, g.units_per_cm}) {
        if (d == 0 || d > kMaxDimension) malformed("geometry dimension out of range");
    }

    CsaParams p;
    p.eta_max = r.f64();
    p.sigmoid_steepness = r.f64();
    p.sigmoid_midpoint = r.f64();
    p.g_floor = r.f64();
    p.g_exponent = r.f64();

    const auto stored_count = r.u64();
    const auto rng_text = r.string();

    const auto quantum = r.u32();
    if (g.num_pixels() > r.remaining() * 8 / g.num_units()) {
        throw SnapshotError(SnapshotFault::truncated, "snapshot truncated in weight section");
    }
    const auto packed_size = WeightMatrix::packed_size(g.num_pixels(), g.num_units());
    if (packed_size > r.remaining()) {
        throw SnapshotError(SnapshotFault::truncated, "snapshot truncated in weight section");
    }
    const auto packed = r.take(packed_size);

    std::optional<StoredItemLedger> ledger;
    const auto has_ledger = r.u8();
    if (has_ledger > 1) malformed("ledger flag");
    std::vector<LedgerEntry> entries;
    std::vector<std::vector<std::uint32_t>> raw_pixels, raw_winners;
    if (has_ledger == 1) {
        const auto count = r.u32();
        ledger.emplace();
        for (std::uint32_t i = 0; i < count; ++i) {
            auto label = r.string();
            raw_pixels.push_back(r.index_list());
            raw_winners.push_back(r.index_list());
            entries.push_back({std::move(label), {}, {}});
        }
    }

    const std::size_t body = r.position();
    if (r.remaining() < 4) {
        throw SnapshotError(SnapshotFault::truncated, "snapshot truncated before checksum");
    }
    const auto stored_crc = r.u32();
    if (r.remaining() != 0) malformed("trailing bytes after checksum");
    if (crc32_of(bytes.first(body)) != stored_crc) {
        throw SnapshotError(SnapshotFault::checksum_mismatch, "snapshot checksum mismatch");
    }

    // Integrity verified; now build the model, mapping domain errors to malformed.
    try {
        Rng rng;
        std::istringstream is(rng_text);
        is >> rng;
        if (!is) malformed("rng state");
        auto weights = WeightMatrix::unpack(packed, g.num_pixels(), g.num_units(), quantum);
        if (ledger) {
            for (std::size_t i = 0; i < entries.size(); ++i) {
                entries[i].input = InputPattern(std::move(raw_pixels[i]));
                entries[i].input.check_against(g);
                entries[i].code = Code(std::move(raw_winners[i]));
                entries[i].code.check_against(g);
            }
            *ledger = std::move(entries);
        }
        return MemoryModel::restore(g, p, std::move(weights), rng, std::move(ledger),
                                    stored_count);
    } catch (const SnapshotError&) {
        throw;
    } catch (const Error& e) {
        malformed(e.what());
    }
}

void save_model(const MemoryModel& model, const std::filesystem::path& path) {
    const auto bytes = encode_snapshot(model);
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot replace " + path.string() + ": " + ec.message());
    }
}

MemoryModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading " + path.string());
    return decode_snapshot(bytes);
}

}  // namespace msdc
