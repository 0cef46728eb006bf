#include "spurs/amd.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "spurs/error.hpp"

namespace spurs {

namespace {

// Quotient-graph minimum degree with approximate external degrees, element
// absorption, supervariable detection and mass elimination.
class QuotientGraph {
 public:
  explicit QuotientGraph(const std::vector<std::vector<std::int32_t>>& adj)
      : n_(static_cast<int>(adj.size())),
        vars_(adj.size()),
        elems_(adj.size()),
        evars_(adj.size()),
        members_(adj.size()),
        nv_(adj.size(), 1),
        state_(adj.size(), kVariable),
        degree_(adj.size(), 0),
        partial_(adj.size(), 0),
        w_(adj.size(), 0),
        head_(adj.size() + 1, -1),
        next_(adj.size(), -1),
        prev_(adj.size(), -1),
        hash_(adj.size(), 0) {
    for (int i = 0; i < n_; ++i) {
      members_[i] = {i};
      for (auto j : adj[static_cast<std::size_t>(i)]) {
        if (j < 0 || j >= n_) throw ValidationError("amd: adjacency index out of range");
        if (j != i) vars_[i].push_back(j);
      }
      std::sort(vars_[i].begin(), vars_[i].end());
      vars_[i].erase(std::unique(vars_[i].begin(), vars_[i].end()), vars_[i].end());
      degree_[i] = static_cast<int>(vars_[i].size());
    }
    for (int i = 0; i < n_; ++i) insert(i, degree_[i]);
  }

  std::vector<std::int32_t> run() {
    std::vector<std::int32_t> order;
    order.reserve(static_cast<std::size_t>(n_));
    int nel = 0;
    std::vector<int> lme;
    while (nel < n_) {
      while (mindeg_ <= n_ && head_[mindeg_] < 0) ++mindeg_;
      if (mindeg_ > n_) throw NumericalError("amd: degree lists exhausted early");
      const int me = head_[mindeg_];
      remove(me);
      const int nvpiv = nv_[me];
      nel += nvpiv;
      for (int v : members_[me]) order.push_back(v);
      members_[me].clear();

      // New element: union of absorbed elements and remaining neighbours.
      lme.clear();
      int degme = 0;
      auto take = [&](int i) {
        if (i != me && state_[i] == kVariable && nv_[i] > 0) {
          degme += nv_[i];
          nv_[i] = -nv_[i];
          lme.push_back(i);
        }
      };
      for (int e : elems_[me]) {
        if (state_[e] != kElement) continue;
        for (int i : evars_[e]) take(i);
        state_[e] = kDead;
        evars_[e].clear();
        evars_[e].shrink_to_fit();
      }
      for (int j : vars_[me]) take(j);
      state_[me] = kElement;
      nv_[me] = nvpiv;
      release(elems_[me]);
      release(vars_[me]);
      for (int i : lme) remove(i);

      // |Le \ Lme| for every element touching Lme, stored as w - wflg.
      for (int i : lme) {
        for (int e : elems_[i]) {
          if (state_[e] != kElement) continue;
          if (w_[e] < wflg_) w_[e] = wflg_ + degree_[e];
          w_[e] += nv_[i];  // nv_[i] < 0 while marked
        }
      }

      std::size_t kept = 0;
      for (int i : lme) {
        const int nvi = -nv_[i];
        long ext = 0;
        auto& el = elems_[i];
        std::size_t q = 0;
        for (int e : el) {
          if (state_[e] != kElement) continue;
          const long out = w_[e] - wflg_;
          if (out == 0) {
            state_[e] = kDead;  // e is a subset of Lme
            evars_[e].clear();
            evars_[e].shrink_to_fit();
            continue;
          }
          ext += out;
          el[q++] = e;
        }
        el.resize(q);
        auto& vl = vars_[i];
        q = 0;
        for (int j : vl) {
          if (state_[j] != kVariable || nv_[j] <= 0) continue;
          ext += nv_[j];
          vl[q++] = j;
        }
        vl.resize(q);
        if (el.empty() && vl.empty()) {
          // Only adjacent to me: eliminate together with the pivot.
          nel += nvi;
          degme -= nvi;
          for (int v : members_[i]) order.push_back(v);
          members_[i].clear();
          nv_[i] = 0;
          state_[i] = kDead;
          continue;
        }
        el.push_back(me);
        partial_[i] = ext;
        lme[kept++] = i;
      }
      lme.resize(kept);

      detect_supervariables(lme, degme);

      for (int i : lme) {
        const int nvi = -nv_[i];
        nv_[i] = nvi;
        const long rest = static_cast<long>(n_ - nel - nvi);
        long d = std::min<long>(static_cast<long>(degree_[i]) + degme - nvi, partial_[i] + degme - nvi);
        d = std::clamp<long>(d, 0, std::max<long>(rest, 0));
        degree_[i] = static_cast<int>(d);
        insert(i, degree_[i]);
        mindeg_ = std::min(mindeg_, degree_[i]);
      }
      evars_[me] = lme;
      degree_[me] = degme;
      if (lme.empty()) state_[me] = kDead;
      wflg_ += n_ + 1;
    }
    return order;
  }

 private:
  static constexpr char kVariable = 0, kElement = 1, kDead = 2;

  void detect_supervariables(std::vector<int>& lme, int /*degme*/) {
    if (lme.size() < 2) return;
    for (int i : lme) {
      std::sort(elems_[i].begin(), elems_[i].end());
      std::sort(vars_[i].begin(), vars_[i].end());
      std::uint64_t h = 1469598103934665603ULL;
      for (int e : elems_[i]) h = (h ^ static_cast<std::uint64_t>(e)) * 1099511628211ULL;
      h = (h ^ 0xffffULL) * 1099511628211ULL;
      for (int j : vars_[i]) h = (h ^ static_cast<std::uint64_t>(j)) * 1099511628211ULL;
      hash_[i] = h;
    }
    std::vector<int> byhash(lme);
    std::stable_sort(byhash.begin(), byhash.end(), [&](int a, int b) { return hash_[a] < hash_[b]; });
    for (std::size_t s = 0; s < byhash.size();) {
      std::size_t t = s;
      while (t < byhash.size() && hash_[byhash[t]] == hash_[byhash[s]]) ++t;
      for (std::size_t a = s; a < t; ++a) {
        const int i = byhash[a];
        if (nv_[i] == 0) continue;
        for (std::size_t b = a + 1; b < t; ++b) {
          const int j = byhash[b];
          if (nv_[j] == 0 || elems_[i] != elems_[j] || vars_[i] != vars_[j]) continue;
          nv_[i] += nv_[j];  // both negative while marked
          members_[i].insert(members_[i].end(), members_[j].begin(), members_[j].end());
          release(members_[j]);
          nv_[j] = 0;
          state_[j] = kDead;
          release(elems_[j]);
          release(vars_[j]);
          partial_[i] = std::min(partial_[i], partial_[j]);
        }
      }
      s = t;
    }
    std::size_t q = 0;
    for (int i : lme)
      if (nv_[i] != 0) lme[q++] = i;
    lme.resize(q);
  }

  template <class V>
  static void release(V& v) {
    V().swap(v);
  }

  void insert(int i, int d) {
    next_[i] = head_[d];
    prev_[i] = -1;
    if (head_[d] >= 0) prev_[head_[d]] = i;
    head_[d] = i;
  }

  void remove(int i) {
    const int d = degree_[i];
    if (prev_[i] >= 0)
      next_[prev_[i]] = next_[i];
    else
      head_[d] = next_[i];
    if (next_[i] >= 0) prev_[next_[i]] = prev_[i];
    next_[i] = prev_[i] = -1;
  }

  int n_;
  std::vector<std::vector<int>> vars_, elems_, evars_, members_;
  std::vector<int> nv_;
  std::vector<char> state_;
  std::vector<int> degree_;
  std::vector<long> partial_;
  std::vector<long> w_;
  long wflg_ = 1;
  std::vector<int> head_, next_, prev_;
  std::vector<std::uint64_t> hash_;
  int mindeg_ = 0;
};

}  // namespace

std::vector<std::int32_t> amd_order(const std::vector<std::vector<std::int32_t>>& adjacency) {
  if (adjacency.size() > static_cast<std::size_t>(std::numeric_limits<int>::max() / 2))
    throw ValidationError("amd: graph too large");
  if (adjacency.empty()) return {};
  QuotientGraph g(adjacency);
  auto order = g.run();
  if (order.size() != adjacency.size()) throw NumericalError("amd: ordering is not a permutation");
  return order;
}

}  // namespace spurs
