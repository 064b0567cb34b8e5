#include "mcflab/covariant_norms.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>

#include "mcflab/error.hpp"

// nabla^k h is expanded in products of theta = ds and P = g - theta (x) theta.
// A word lists one code per slot: -1 for theta, otherwise the partner slot of a
// P factor. Rules: nabla theta = psi P, nabla_a P_jl = -psi (P_aj theta_l + theta_j P_al).
// Contracting two words gives (n-1)^cycles when their theta slots agree, else 0.

namespace mcflab {
namespace {

using Word = std::vector<std::int8_t>;

struct Transition {
  int src, dst;
  bool derivative;  // else psi multiple
  double sign;
};

struct Level {
  std::vector<Word> words;
  std::vector<Transition> from_prev;
  // words grouped by theta mask
  std::vector<std::vector<int>> blocks;
  std::vector<std::vector<std::int8_t>> block_cycles;  // row-major block x block
};

int cycles(const Word& a, const Word& b) {
  const int r = static_cast<int>(a.size());
  std::vector<char> seen(r, 0);
  int cyc = 0;
  for (int i = 0; i < r; ++i) {
    if (a[i] < 0 || seen[i]) continue;
    ++cyc;
    int j = i;
    do {
      seen[j] = 1;
      int p = a[j];
      seen[p] = 1;
      j = b[p];
    } while (j != i);
  }
  return cyc;
}

class WordTable {
 public:
  static const WordTable& get() {
    static WordTable t;
    return t;
  }
  const Level& level(int k) const { return levels_[k]; }

 private:
  WordTable() {
    levels_.resize(kMaxDerivativeOrder + 1);
    levels_[0].words = {Word{-1, -1}, Word{1, 0}};
    for (int k = 1; k <= kMaxDerivativeOrder; ++k) build_level(k);
    for (int k = 0; k <= kMaxDerivativeOrder; ++k) build_blocks(levels_[k]);
  }

  void build_level(int k) {
    const Level& prev = levels_[k - 1];
    Level& cur = levels_[k];
    std::map<Word, int> index;
    auto add = [&](const Word& w, int src, bool d, double sign) {
      auto it = index.find(w);
      int id;
      if (it == index.end()) {
        id = static_cast<int>(cur.words.size());
        index.emplace(w, id);
        cur.words.push_back(w);
      } else {
        id = it->second;
      }
      cur.from_prev.push_back({src, id, d, sign});
    };
    for (int src = 0; src < static_cast<int>(prev.words.size()); ++src) {
      const Word& w = prev.words[src];
      Word base(w.size() + 1);
      base[0] = -1;
      for (size_t i = 0; i < w.size(); ++i) base[i + 1] = w[i] < 0 ? -1 : static_cast<std::int8_t>(w[i] + 1);
      add(base, src, true, 1.0);
      const int r = static_cast<int>(base.size());
      for (int j = 1; j < r; ++j) {
        int code = base[j];
        if (code == -1) {
          Word nw = base;
          nw[0] = static_cast<std::int8_t>(j);
          nw[j] = 0;
          add(nw, src, false, 1.0);
        } else if (code > j) {
          int l = code;
          Word a = base;
          a[0] = static_cast<std::int8_t>(j);
          a[j] = 0;
          a[l] = -1;
          add(a, src, false, -1.0);
          Word b = base;
          b[0] = static_cast<std::int8_t>(l);
          b[l] = 0;
          b[j] = -1;
          add(b, src, false, -1.0);
        }
      }
    }
  }

  static void build_blocks(Level& lv) {
    std::map<std::vector<bool>, int> mask_index;
    for (int i = 0; i < static_cast<int>(lv.words.size()); ++i) {
      std::vector<bool> mask;
      for (auto c : lv.words[i]) mask.push_back(c < 0);
      auto it = mask_index.find(mask);
      if (it == mask_index.end()) {
        mask_index.emplace(mask, static_cast<int>(lv.blocks.size()));
        lv.blocks.push_back({i});
      } else {
        lv.blocks[it->second].push_back(i);
      }
    }
    for (const auto& blk : lv.blocks) {
      const int b = static_cast<int>(blk.size());
      std::vector<std::int8_t> cyc(static_cast<size_t>(b) * b);
      for (int x = 0; x < b; ++x)
        for (int y = 0; y < b; ++y) cyc[static_cast<size_t>(x) * b + y] = static_cast<std::int8_t>(cycles(lv.words[blk[x]], lv.words[blk[y]]));
      lv.block_cycles.push_back(std::move(cyc));
    }
  }

  std::vector<Level> levels_;
};

// Gram blocks (n-1)^cycles cached per (n, k).
const std::vector<Eigen::MatrixXd>& gram_blocks(int n, int k) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<Eigen::MatrixXd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const Level& lv = WordTable::get().level(k);
  std::vector<double> powers(k + 3, 1.0);
  for (size_t i = 1; i < powers.size(); ++i) powers[i] = powers[i - 1] * (n - 1);
  std::vector<Eigen::MatrixXd> out;
  for (size_t bi = 0; bi < lv.blocks.size(); ++bi) {
    const int b = static_cast<int>(lv.blocks[bi].size());
    Eigen::MatrixXd G(b, b);
    for (int x = 0; x < b; ++x)
      for (int y = 0; y < b; ++y) G(x, y) = powers[lv.block_cycles[bi][static_cast<size_t>(x) * b + y]];
    out.push_back(std::move(G));
  }
  return cache.emplace(key, std::move(out)).first->second;
}

}  // namespace

std::vector<DerivativeNorms> covariant_derivative_norms(const std::vector<MeridianJets>& jets, int n, int kmax) {
  if (n < 2 || kmax < 0 || kmax > kMaxDerivativeOrder)
    throw PreconditionError("rotsym_flow", "derivative_norms", "requires n >= 2 and 0 <= k <= 8");
  const WordTable& table = WordTable::get();
  const int N = static_cast<int>(jets.size());
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<DerivativeNorms> out(N);
  for (auto& d : out) d.fill(nan);
  if (N == 0 || kmax == 0) return out;
  for (const auto& j : jets)
    if (j.k_axial.size() < kmax + 1 || j.k_rot.size() < kmax + 1 || j.psi.size() < kmax + 1)
      throw PreconditionError("rotsym_flow", "derivative_norms", "jets too short for requested order");

  constexpr int kChunk = 16;
  for (int start = 0; start < N; start += kChunk) {
    const int cnt = std::min(kChunk, N - start);
    // coef[w * cnt + node] is a jet (order kmax - level).
    std::vector<Jet> coef(2 * cnt);
    for (int c = 0; c < cnt; ++c) {
      const MeridianJets& mj = jets[start + c];
      coef[0 * cnt + c] = mj.k_axial.truncated(kmax + 1);
      coef[1 * cnt + c] = mj.k_rot.truncated(kmax + 1);
    }
    for (int k = 1; k <= kmax; ++k) {
      const Level& lv = table.level(k);
      const int sz = kmax + 1 - k;
      std::vector<Jet> next(lv.words.size() * cnt, Jet(sz, 0.0));
      std::vector<Jet> psi(cnt);
      for (int c = 0; c < cnt; ++c) psi[c] = jets[start + c].psi.truncated(sz);
      for (const Transition& t : lv.from_prev) {
        for (int c = 0; c < cnt; ++c) {
          const Jet& src = coef[static_cast<size_t>(t.src) * cnt + c];
          Jet& dst = next[static_cast<size_t>(t.dst) * cnt + c];
          if (t.derivative)
            dst += src.diff().truncated(sz);
          else
            dst += (psi[c] * src.truncated(sz)) * t.sign;
        }
      }
      coef = std::move(next);
      const auto& G = gram_blocks(n, k);
      std::vector<double> sq(cnt, 0.0);
      for (size_t bi = 0; bi < lv.blocks.size(); ++bi) {
        const auto& blk = lv.blocks[bi];
        Eigen::MatrixXd C(blk.size(), cnt);
        for (size_t x = 0; x < blk.size(); ++x)
          for (int c = 0; c < cnt; ++c) C(x, c) = coef[static_cast<size_t>(blk[x]) * cnt + c][0];
        Eigen::MatrixXd GC = G[bi] * C;
        for (int c = 0; c < cnt; ++c) sq[c] += C.col(c).dot(GC.col(c));
      }
      for (int c = 0; c < cnt; ++c) out[start + c][k] = std::sqrt(std::max(0.0, sq[c]));
    }
  }
  return out;
}

}  // namespace mcflab
