#include "transitepi/contact_graph.h"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "fmt/core.h"

#include "transitepi/csv.h"
#include "transitepi/error.h"

namespace transitepi {

contact_graph::contact_graph(std::size_t m, std::vector<contact_event> events)
    : m_{m}, events_{std::move(events)} {
  for (auto& e : events_) {
    if (e.i >= m_ || e.j >= m_) {
      throw data_error{data_errc::unknown_person, {}, 0,
                       fmt::format("{}", e.i >= m_ ? e.i : e.j),
                       fmt::format("population has {} persons", m_)};
    }
    if (e.i == e.j) {
      throw data_error{data_errc::malformed_row, {}, 0, "contact",
                       fmt::format("self contact of person {}", e.i)};
    }
    if (e.minutes <= 0 || e.minutes > kMinutesPerDay) {
      throw data_error{data_errc::malformed_row, {}, 0, "minutes",
                       fmt::format("overlap {} outside (0, 1440]", e.minutes)};
    }
    if (e.i > e.j) {
      std::swap(e.i, e.j);
    }
  }
  std::sort(events_.begin(), events_.end());

  std::vector<std::size_t> degree(m_ + 1, 0);
  for (auto const& e : events_) {
    ++degree[e.i];
    ++degree[e.j];
  }
  offsets_.assign(m_ + 1, 0);
  for (auto i = std::size_t{0}; i < m_; ++i) {
    offsets_[i + 1] = offsets_[i] + degree[i];
  }
  adjacency_.resize(offsets_[m_]);
  auto fill = offsets_;
  for (auto const& e : events_) {
    adjacency_[fill[e.i]++] = contact_edge{e.j, e.kind, e.minutes};
    adjacency_[fill[e.j]++] = contact_edge{e.i, e.kind, e.minutes};
  }
  for (auto i = std::size_t{0}; i < m_; ++i) {
    std::stable_sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                     adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
                     [](contact_edge const& a, contact_edge const& b) {
                       return a.neighbor < b.neighbor;
                     });
  }
}

namespace {

struct stay {
  person_idx_t person;
  minutes_t start;
  minutes_t end;
};

void location_pairs(std::vector<stay>& stays, location_idx_t loc,
                    location_kind kind,
                    std::optional<std::size_t> const& max_group,
                    std::vector<contact_event>& out) {
  // Group ids by person rank, so a capped crowd splits deterministically.
  std::vector<person_idx_t> occupants;
  occupants.reserve(stays.size());
  for (auto const& s : stays) {
    occupants.push_back(s.person);
  }
  std::sort(occupants.begin(), occupants.end());
  occupants.erase(std::unique(occupants.begin(), occupants.end()),
                  occupants.end());
  auto const group_of = [&](person_idx_t p) -> std::size_t {
    if (!max_group.has_value() || occupants.size() <= *max_group) {
      return 0;
    }
    auto const rank = static_cast<std::size_t>(
        std::lower_bound(occupants.begin(), occupants.end(), p) -
        occupants.begin());
    return rank / *max_group;
  };

  std::sort(stays.begin(), stays.end(), [](stay const& a, stay const& b) {
    return std::tie(a.start, a.person) < std::tie(b.start, b.person);
  });

  std::unordered_map<std::uint64_t, minutes_t> overlap;
  for (auto a = std::size_t{0}; a < stays.size(); ++a) {
    for (auto b = a + 1; b < stays.size() && stays[b].start < stays[a].end;
         ++b) {
      auto const pa = stays[a].person;
      auto const pb = stays[b].person;
      if (pa == pb || group_of(pa) != group_of(pb)) {
        continue;
      }
      auto const minutes =
          std::min(stays[a].end, stays[b].end) - stays[b].start;
      if (minutes <= 0) {
        continue;
      }
      auto const lo = std::min(pa, pb);
      auto const hi = std::max(pa, pb);
      overlap[(static_cast<std::uint64_t>(lo) << 32U) | hi] += minutes;
    }
  }

  auto const first = out.size();
  for (auto const& [key, minutes] : overlap) {
    out.push_back(contact_event{static_cast<person_idx_t>(key >> 32U),
                                static_cast<person_idx_t>(key & 0xFFFFFFFFU),
                                kind, minutes, loc});
  }
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

}  // namespace

std::vector<contact_event> place_contacts(population_dataset const& ds,
                                          contact_build_options const& opt) {
  std::vector<std::vector<stay>> stays(ds.locations.size());
  for (auto p = person_idx_t{0}; p < ds.persons.size(); ++p) {
    for (auto const& a : ds.persons[p].activities) {
      stays[a.location].push_back(stay{p, a.start, a.end()});
    }
  }

  auto const n_loc = static_cast<std::ptrdiff_t>(ds.locations.size());
  std::vector<std::vector<contact_event>> per_location(ds.locations.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t l = 0; l < n_loc; ++l) {
    auto const loc = static_cast<location_idx_t>(l);
    location_pairs(stays[loc], loc, ds.locations[loc].kind, opt.max_group_size,
                   per_location[loc]);
  }

  std::vector<contact_event> out;
  for (auto& v : per_location) {
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

contact_graph build_contacts(population_dataset const& ds,
                             std::span<contact_event const> transit_events,
                             contact_build_options const& opt) {
  auto events = place_contacts(ds, opt);
  events.insert(events.end(), transit_events.begin(), transit_events.end());
  return contact_graph{ds.size(), std::move(events)};
}

degree_decomposition degree_decompose(contact_graph const& g) {
  degree_decomposition d;
  d.k_bus.assign(g.size(), 0);
  d.k_nonbus.assign(g.size(), 0);
  for (auto i = person_idx_t{0}; i < g.size(); ++i) {
    auto const adj = g.neighbors(i);
    for (auto a = std::size_t{0}; a < adj.size();) {
      auto b = a;
      auto bus = false;
      auto nonbus = false;
      for (; b < adj.size() && adj[b].neighbor == adj[a].neighbor; ++b) {
        (adj[b].kind == location_kind::transit ? bus : nonbus) = true;
      }
      d.k_bus[i] += bus ? 1U : 0U;
      d.k_nonbus[i] += nonbus ? 1U : 0U;
      a = b;
    }
  }
  return d;
}

degree_moments compute_degree_moments(degree_decomposition const& d) {
  if (d.size() == 0) {
    throw model_error{model_errc::empty_population,
                      "degree moments of an empty population"};
  }
  degree_moments m;
  for (auto i = std::size_t{0}; i < d.size(); ++i) {
    auto const b = static_cast<double>(d.k_bus[i]);
    auto const n = static_cast<double>(d.k_nonbus[i]);
    m.mean_kbus += b;
    m.mean_knonbus += n;
    m.mean_kbus2 += b * b;
    m.mean_knonbus2 += n * n;
    m.mean_cross += b * n;
    m.mean_k2 += (b + n) * (b + n);
  }
  auto const inv = 1.0 / static_cast<double>(d.size());
  m.mean_kbus *= inv;
  m.mean_knonbus *= inv;
  m.mean_kbus2 *= inv;
  m.mean_knonbus2 *= inv;
  m.mean_cross *= inv;
  m.mean_k2 *= inv;
  m.mean_k = m.mean_kbus + m.mean_knonbus;
  return m;
}

std::string serialize_edge_list(std::span<contact_event const> events) {
  std::string out = "i,j,kind,minutes\n";
  for (auto const& e : events) {
    out += fmt::format("{},{},{},{}\n", e.i, e.j, to_string(e.kind), e.minutes);
  }
  return out;
}

std::string serialize_copresence(std::span<contact_event const> events,
                                 int day) {
  std::string out = "day,person_i,person_j,kind,minutes\n";
  for (auto const& e : events) {
    out += fmt::format("{},{},{},{},{}\n", day, e.i, e.j, to_string(e.kind),
                       e.minutes);
  }
  return out;
}

contact_graph parse_edge_list(std::string_view text, std::string const& file,
                              std::optional<std::size_t> m) {
  auto const table = parse_csv(text, file);
  auto const ci = table.column("i");
  auto const cj = table.column("j");
  auto const ck = table.column("kind");
  auto const cm = table.column("minutes");

  auto const parse_u32 = [&](csv_row const& row, std::size_t col,
                             char const* name) {
    auto const s = table.field(row, col);
    std::uint32_t v{};
    auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw data_error{data_errc::malformed_row, file, row.line, name,
                       "expected a non-negative integer"};
    }
    return v;
  };

  std::vector<contact_event> events;
  auto max_idx = std::size_t{0};
  for (auto const& row : table.rows) {
    auto const i = parse_u32(row, ci, "i");
    auto const j = parse_u32(row, cj, "j");
    auto const kind = parse_location_kind(table.field(row, ck));
    if (!kind) {
      throw data_error{data_errc::malformed_row, file, row.line, "kind",
                       "unknown kind"};
    }
    auto const minutes = parse_u32(row, cm, "minutes");
    if (i == j || minutes == 0 || minutes > kMinutesPerDay) {
      throw data_error{data_errc::malformed_row, file, row.line, "minutes",
                       "self loop or overlap outside (0, 1440]"};
    }
    max_idx = std::max<std::size_t>({max_idx, i, j});
    events.push_back(contact_event{i, j, *kind,
                                   static_cast<minutes_t>(minutes),
                                   static_cast<std::uint32_t>(row.line)});
  }
  auto const n = m.value_or(events.empty() ? 0 : max_idx + 1);
  if (!events.empty() && max_idx >= n) {
    throw data_error{data_errc::unknown_person, file, 0,
                     fmt::format("{}", max_idx),
                     fmt::format("edge list declares {} persons", n)};
  }
  return contact_graph{n, std::move(events)};
}

}  // namespace transitepi
