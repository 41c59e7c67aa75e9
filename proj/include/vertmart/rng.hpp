#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace vertmart {

// Philox 4x32-10 counter-based generator. Each path owns a stream keyed by
// (master_seed, path_index), so ensemble output cannot depend on how paths
// are scheduled across workers.
struct Philox4x32 {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                         std::array<uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(kMul0) * ctr[0];
            const uint64_t p1 = static_cast<uint64_t>(kMul1) * ctr[2];
            const std::array<uint32_t, 4> next = {
                static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                static_cast<uint32_t>(p1),
                static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                static_cast<uint32_t>(p0),
            };
            ctr = next;
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// Stream of standard normal deviates for one path, derived from
/// (master_seed, path_index). Box-Muller on Philox output.
class GaussianStream {
public:
    GaussianStream(uint64_t master_seed, uint64_t path_index)
        : key_{static_cast<uint32_t>(master_seed),
               static_cast<uint32_t>(master_seed >> 32)},
          path_lo_(static_cast<uint32_t>(path_index)),
          path_hi_(static_cast<uint32_t>(path_index >> 32)) {}

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform in the open interval (0, 1).
    double next_unit() {
        const uint32_t w = next_u32();
        return (static_cast<double>(w) + 0.5) * 0x1p-32;
    }

    uint32_t next_u32() {
        if (word_ == 4) {
            buf_ = Philox4x32::block({static_cast<uint32_t>(block_index_),
                                      static_cast<uint32_t>(block_index_ >> 32),
                                      path_lo_, path_hi_},
                                     key_);
            ++block_index_;
            word_ = 0;
        }
        return buf_[word_++];
    }

private:
    std::array<uint32_t, 2> key_;
    uint32_t path_lo_, path_hi_;
    uint64_t block_index_ = 0;
    std::array<uint32_t, 4> buf_{};
    int word_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace vertmart
