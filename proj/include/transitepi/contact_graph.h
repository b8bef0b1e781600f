#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "transitepi/activity.h"
#include "transitepi/types.h"

namespace transitepi {

/// Co-presence of two persons at one place (location index, or run index for
/// transit) for `minutes` of the repeating day. Canonical form has i < j.
struct contact_event {
  person_idx_t i{0};
  person_idx_t j{0};
  location_kind kind{location_kind::other};
  minutes_t minutes{0};
  std::uint32_t place{0};

  friend bool operator==(contact_event const&, contact_event const&) = default;
  friend auto operator<=>(contact_event const&, contact_event const&) = default;
};

struct contact_edge {
  person_idx_t neighbor{0};
  location_kind kind{location_kind::other};
  minutes_t minutes{0};
};

/// Undirected, loop-free contact multigraph over m persons. Edges of
/// different kinds (or places) between the same pair are kept apart.
class contact_graph {
public:
  contact_graph() = default;

  /// Throws data_error(unknown_person) for indices >= m and
  /// data_error(malformed_row) for self-loops or minutes outside (0, 1440].
  contact_graph(std::size_t m, std::vector<contact_event> events);

  std::size_t size() const { return m_; }
  std::size_t edge_count() const { return events_.size(); }

  /// Adjacency of one person, sorted by neighbor.
  std::span<contact_edge const> neighbors(person_idx_t i) const {
    return {adjacency_.data() + offsets_[i],
            adjacency_.data() + offsets_[i + 1]};
  }

  /// Canonical edge list, sorted by (i, j, kind, place).
  std::vector<contact_event> const& events() const { return events_; }

private:
  std::size_t m_{0};
  std::vector<contact_event> events_;
  std::vector<std::size_t> offsets_{0};
  std::vector<contact_edge> adjacency_;
};

struct contact_build_options {
  /// Largest group mixing fully at one location; bigger crowds are split
  /// into consecutive groups of this size. Unset means no cap.
  std::optional<std::size_t> max_group_size;
};

/// Pairwise co-location contacts: for every location, one event per pair of
/// persons whose stays there overlap, weighted by the summed overlap.
std::vector<contact_event> place_contacts(population_dataset const&,
                                          contact_build_options const& = {});

contact_graph build_contacts(population_dataset const&,
                             std::span<contact_event const> transit_events,
                             contact_build_options const& = {});

struct degree_decomposition {
  std::vector<std::uint32_t> k_bus;     // distinct transit neighbors
  std::vector<std::uint32_t> k_nonbus;  // distinct non-transit neighbors

  std::size_t size() const { return k_bus.size(); }
  std::uint32_t k(std::size_t i) const { return k_bus[i] + k_nonbus[i]; }
};

/// A neighbor linked both by transit and another kind counts in both parts.
degree_decomposition degree_decompose(contact_graph const&);

struct degree_moments {
  double mean_k{0.0};
  double mean_k2{0.0};
  double mean_kbus{0.0};
  double mean_knonbus{0.0};
  double mean_kbus2{0.0};
  double mean_knonbus2{0.0};
  double mean_cross{0.0};  // <k_bus * k_nonbus>
};

/// Throws model_error(empty_population) for an empty decomposition.
degree_moments compute_degree_moments(degree_decomposition const&);

/// Delimited text: i,j,kind,minutes (person indices). Transit rows also
/// serve as the co-presence dump when `day` is written.
std::string serialize_edge_list(std::span<contact_event const>);
std::string serialize_copresence(std::span<contact_event const>, int day = 0);

/// Reads i,j,kind,minutes rows. m defaults to the largest index + 1.
contact_graph parse_edge_list(std::string_view text, std::string const& file,
                              std::optional<std::size_t> m = std::nullopt);

}  // namespace transitepi
