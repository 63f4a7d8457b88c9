#include "stbddc/partition/constraints.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace stbddc {

std::vector<GeometricObject> classify_objects(const SpaceTimePartition& p) {
  const SpaceTimeMesh& mesh = p.mesh();
  // group interface DOFs by neighbor set
  std::map<std::vector<int>, std::vector<int>> groups;
  for (int dof = 0; dof < mesh.num_interior(); ++dof) {
    if (!p.is_interface(dof)) continue;
    const auto n = p.neighbors(dof);
    groups[std::vector<int>(n.begin(), n.end())].push_back(dof);
  }
  const int nxi = mesh.nx() - 1;
  std::vector<GeometricObject> objects;
  std::vector<int> component(mesh.num_interior(), -1);
  for (auto& [neigh, dofs] : groups) {
    const ObjectKind kind = neigh.size() >= 3 ? ObjectKind::kCorner : ObjectKind::kEdge;
    std::vector<char> in_group(mesh.num_interior(), 0);
    for (int d : dofs) in_group[d] = 1;
    // connected components under grid adjacency
    for (int seed : dofs) {
      if (component[seed] >= 0) continue;
      GeometricObject obj;
      obj.kind = kind;
      obj.neigh = neigh;
      std::vector<int> stack{seed};
      component[seed] = static_cast<int>(objects.size());
      while (!stack.empty()) {
        const int d = stack.back();
        stack.pop_back();
        obj.dofs.push_back(d);
        const int i = d % nxi, j = d / nxi;
        const int cand[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
        for (const auto& c : cand) {
          if (c[0] < 0 || c[0] >= nxi || c[1] < 0 || c[1] >= mesh.ny() - 1) continue;
          const int e = c[1] * nxi + c[0];
          if (in_group[e] && component[e] < 0) {
            component[e] = component[seed];
            stack.push_back(e);
          }
        }
      }
      std::sort(obj.dofs.begin(), obj.dofs.end());
      if (kind == ObjectKind::kCorner && obj.dofs.size() > 1) {
        // a multi-node corner cannot occur on a Cartesian partition; split it
        for (int d : obj.dofs) {
          GeometricObject single{ObjectKind::kCorner, obj.neigh, {d}, {1.0}};
          objects.push_back(std::move(single));
        }
        continue;
      }
      const double w = kind == ObjectKind::kCorner ? 1.0 : mesh.h();
      obj.weights.assign(obj.dofs.size(), w);
      objects.push_back(std::move(obj));
    }
  }
  std::stable_sort(objects.begin(), objects.end(), [](const GeometricObject& a, const GeometricObject& b) {
    return std::tie(a.kind, a.neigh, a.dofs.front()) < std::tie(b.kind, b.neigh, b.dofs.front());
  });
  return objects;
}

CoarseSpace build_constraints(const SpaceTimePartition& p, CoarseVariant variant, ConstraintMode mode) {
  require(mode == ConstraintMode::kSpaceTime || p.pt() == 1, ErrorCode::kInvalidArgument,
          "space-only constraints need a single time slab");
  CoarseSpace cs;
  for (auto& obj : classify_objects(p)) {
    if (variant == CoarseVariant::kCorners && obj.kind != ObjectKind::kCorner) continue;
    cs.objects.push_back(std::move(obj));
  }
  const int n_obj = static_cast<int>(cs.objects.size());
  std::vector<std::vector<int>> objects_of(p.num_spatial());
  for (int o = 0; o < n_obj; ++o)
    for (int w : cs.objects[o].neigh) objects_of[w].push_back(o);

  const double dt = p.mesh().dt();
  const int kn = p.steps_per_slab();
  using Key = std::tuple<int, int, int>;  // (kind, object or subdomain, time index)
  struct Row {
    Key key;
    ConstraintKind kind;
    std::vector<std::pair<int, double>> entries;
  };
  std::vector<std::vector<Row>> rows(p.num_subdomains());
  std::map<Key, int> ids;

  for (int layer = 0; layer < p.pt(); ++layer) {
    for (int omega = 0; omega < p.num_spatial(); ++omega) {
      const LocalLayout lay = local_layout(p, omega, layer);
      const SpatialSubdomain& sub = p.spatial(omega);
      auto& out = rows[subdomain_id(p, omega, layer)];
      auto object_row = [&](int o, int step, double scale) {
        std::vector<std::pair<int, double>> e;
        const auto& obj = cs.objects[o];
        for (std::size_t a = 0; a < obj.dofs.size(); ++a)
          e.emplace_back(lay.index(step, sub.local_of_global[obj.dofs[a]]), scale * obj.weights[a]);
        return e;
      };
      auto mean_row = [&](int step) {
        std::vector<std::pair<int, double>> e;
        const double h2 = p.mesh().h() * p.mesh().h();
        for (int a = 0; a < sub.num_local(); ++a) e.emplace_back(lay.index(step, a), 0.25 * h2 * sub.cells_at_node[a]);
        return e;
      };

      if (mode == ConstraintMode::kSpaceOnly) {
        for (int s = lay.first_step; s <= lay.last_step; ++s)
          for (int o : objects_of[omega])
            out.push_back({Key{0, o, s}, ConstraintKind::kSpaceAverage, object_row(o, s, 1.0)});
        continue;
      }
      for (int o : objects_of[omega]) {
        if (kn < 2) {
          ++cs.dropped_rows;
          continue;
        }
        Row r{Key{0, o, layer}, ConstraintKind::kSpaceAverage, {}};
        for (int s = 1; s <= kn - 1; ++s) {
          auto e = object_row(o, s, dt);
          r.entries.insert(r.entries.end(), e.begin(), e.end());
        }
        out.push_back(std::move(r));
      }
      if (!lay.first_in_time) {
        out.push_back({Key{1, omega, layer}, ConstraintKind::kTimeInterfaceMean, mean_row(0)});
        for (int o : objects_of[omega])
          out.push_back({Key{2, o, layer}, ConstraintKind::kTimeInterfaceObject, object_row(o, 0, 1.0)});
      }
      if (!lay.last_in_time) {
        out.push_back({Key{1, omega, layer + 1}, ConstraintKind::kTimeInterfaceMean, mean_row(kn)});
        for (int o : objects_of[omega])
          out.push_back({Key{2, o, layer + 1}, ConstraintKind::kTimeInterfaceObject, object_row(o, kn, 1.0)});
      }
    }
  }
  if (cs.dropped_rows > 0) {
    cs.log.push_back("dropped " + std::to_string(cs.dropped_rows) +
                     " space-average constraint rows: a single step per slab leaves no time-interior steps");
  }
  for (const auto& sub_rows : rows)
    for (const Row& r : sub_rows) ids.emplace(r.key, 0);
  int next = 0;
  for (auto& [key, id] : ids) id = next++;
  cs.num_global = next;

  cs.subdomains.resize(p.num_subdomains());
  for (int layer = 0; layer < p.pt(); ++layer) {
    for (int omega = 0; omega < p.num_spatial(); ++omega) {
      const int sid = subdomain_id(p, omega, layer);
      SubdomainConstraints& sc = cs.subdomains[sid];
      sc.layout = local_layout(p, omega, layer);
      std::vector<Triplet> t;
      for (std::size_t r = 0; r < rows[sid].size(); ++r) {
        const Row& row = rows[sid][r];
        sc.global_ids.push_back(ids.at(row.key));
        sc.kinds.push_back(row.kind);
        for (const auto& [col, v] : row.entries) t.push_back({static_cast<int>(r), col, v});
      }
      sc.c = SparseMatrix::from_triplets(static_cast<int>(rows[sid].size()), sc.layout.size(), std::move(t));
    }
  }
  return cs;
}

}  // namespace stbddc
