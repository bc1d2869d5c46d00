#include "bsvem/error.hpp"
#include "bsvem/vem.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

namespace bsvem::vem {

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BSVEM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

using Key = std::vector<long long>;

Key translate_key(const Polygon& p, double unit) {
  Key k;
  k.reserve(2 * p.size());
  for (const Point& x : p) {
    k.push_back(std::llround((x.x() - p[0].x()) / unit));
    k.push_back(std::llround((x.y() - p[0].y()) / unit));
  }
  return k;
}

struct LocalPair {
  DenseMatrix stiffness;
  DenseMatrix mass;
};

}  // namespace

GlobalOperators assemble(const mesh::BulkSurfaceMesh& mesh, const AssemblyOptions& opts) {
  const Index ne = mesh.num_elements();
  const Index n = mesh.num_nodes();
  const Index m = mesh.num_boundary_nodes;

  // Elements that are translates of an earlier element share its local matrices.
  std::vector<Index> representative(ne);
  std::vector<Index> reps;
  {
    std::map<Key, Index> seen;
    const double unit = 1e-13 * std::max(mesh.meshsize, 1e-300);
    for (Index e = 0; e < ne; ++e) {
      if (!opts.reuse_translates) {
        representative[e] = e;
        reps.push_back(e);
        continue;
      }
      const auto [it, fresh] = seen.emplace(translate_key(mesh.polygon(e), unit), e);
      representative[e] = it->second;
      if (fresh) reps.push_back(e);
    }
  }

  std::vector<LocalPair> local(ne);
  std::vector<Index> failed;
  std::mutex failed_mutex;
  const int threads = std::max(1, std::min<int>(resolve_thread_count(opts.threads), static_cast<int>(reps.size())));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const Index e = reps[k];
      try {
        const LocalElementData d = local_projector(mesh.polygon(e), opts.vem, e);
        local[e] = {local_stiffness(d, opts.vem), local_mass(d, opts.vem)};
      } catch (const DegenerateElement&) {
        std::lock_guard<std::mutex> lock(failed_mutex);
        failed.push_back(e);
      }
    }
  };
  if (threads == 1) {
    work(0, reps.size());
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(work, reps.size() * t / threads, reps.size() * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }
  if (!failed.empty()) {
    std::sort(failed.begin(), failed.end());
    std::string ids;
    for (Index e : failed) ids += (ids.empty() ? "" : ", ") + std::to_string(e);
    throw DegenerateElement("assembly: degenerate elements " + ids, failed);
  }

  std::vector<linalg::Triplet> tk, tm;
  std::size_t entries = 0;
  for (const auto& el : mesh.elements) entries += el.size() * el.size();
  tk.reserve(entries);
  tm.reserve(entries);
  for (Index e = 0; e < ne; ++e) {
    const auto& el = mesh.elements[e];
    const LocalPair& lp = local[representative[e]];
    for (std::size_t i = 0; i < el.size(); ++i)
      for (std::size_t j = 0; j < el.size(); ++j) {
        tk.push_back({el[i], el[j], lp.stiffness(i, j)});
        tm.push_back({el[i], el[j], lp.mass(i, j)});
      }
  }

  std::vector<linalg::Triplet> sk, sm;
  for (const auto& [a, b] : mesh.boundary_edges) {
    const EdgeMatrices em = surface_edge_matrices((mesh.nodes[b] - mesh.nodes[a]).norm());
    const Index idx[2] = {a, b};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        sk.push_back({idx[i], idx[j], em.stiffness(i, j)});
        sm.push_back({idx[i], idx[j], em.mass(i, j)});
      }
  }

  GlobalOperators ops;
  ops.bulk_stiffness = linalg::SparseMatrix::from_triplets(n, n, std::move(tk));
  ops.bulk_mass = linalg::SparseMatrix::from_triplets(n, n, std::move(tm));
  ops.surface_stiffness = linalg::SparseMatrix::from_triplets(m, m, std::move(sk));
  ops.surface_mass = linalg::SparseMatrix::from_triplets(m, m, std::move(sm));
  ops.stats.computed = static_cast<Index>(reps.size());
  ops.stats.reused = ne - ops.stats.computed;
  return ops;
}

}  // namespace bsvem::vem
