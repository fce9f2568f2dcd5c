#include "mutforge/study_dataset.hpp"

#include <cstdio>
#include <deque>

#include "mutforge/util.hpp"

namespace mutforge {

namespace {

// All tables are indexed by library in declaration order:
// tensorflow, pytorch, scikit_learn, pandas, numpy.
constexpr long long kVulnClass[5][6] = {
    // numeric, memory, buffer, resource, concurrency, others
    {70, 52, 49, 27, 39, 13},  // tensorflow
    {27, 16, 12, 13, 2, 5},    // pytorch
    {22, 10, 1, 0, 1, 3},      // scikit_learn
    {41, 15, 12, 13, 0, 3},    // pandas
    {24, 86, 15, 13, 4, 8},    // numpy
};
constexpr long long kNumericLeaf[5][4] = {
    // integer_overflow, insufficient_precision, division_by_zero, integer_underflow
    {63, 4, 2, 1}, {18, 6, 3, 0}, {8, 4, 7, 3}, {34, 3, 3, 1}, {12, 10, 2, 0},
};
constexpr long long kMemoryLeaf[5][5] = {
    // memory_leak, null_pointer_dereference, infinite_loop, double_free, use_after_free
    {6, 25, 19, 1, 1}, {2, 7, 5, 2, 0}, {8, 0, 2, 0, 0}, {5, 6, 3, 1, 0}, {65, 10, 5, 2, 4},
};

constexpr long long kRootCauseClass[5][6] = {
    // data_type, memory, api, business_logic, concurrency, others
    {100, 57, 14, 27, 27, 25},
    {35, 19, 5, 9, 3, 4},
    {14, 7, 8, 8, 0, 0},
    {36, 15, 15, 6, 0, 12},
    {28, 78, 26, 8, 3, 7},
};
constexpr long long kDataTypeLeaf[5][4] = {
    // numerical_precision_error, tensor_property_issue, using_improper_data_type,
    // incorrect_type_conversion
    {34, 47, 13, 6}, {17, 11, 5, 2}, {12, 0, 1, 1}, {21, 2, 4, 9}, {10, 13, 1, 4},
};
constexpr long long kMemoryErrLeaf[5][4] = {
    // invalid_memory_access, improper_memory_management, stack_or_buffer_size_issue,
    // out_of_bound_read
    {41, 4, 7, 5}, {17, 1, 1, 0}, {0, 6, 0, 1}, {8, 3, 1, 3}, {13, 58, 4, 3},
};
constexpr long long kApiLeaf[5][4] = {
    // using_wrong_api, api_misuse, malicious_parameters, api_version_issue
    {3, 3, 3, 5}, {2, 1, 1, 1}, {2, 3, 3, 0}, {3, 4, 7, 1}, {11, 9, 4, 2},
};

constexpr long long kSymptom[5][6] = {
    // segmentation_fault, crash, unexpected_behavior, resource_consumption, hang, others
    {69, 73, 47, 32, 29, 0},
    {30, 18, 18, 2, 6, 1},
    {0, 10, 17, 7, 2, 1},
    {26, 16, 27, 5, 2, 8},
    {37, 16, 18, 70, 5, 4},
};

constexpr long long kFixClass[5][7] = {
    // add_checkers, modify_business_logic, resolve_data_type, resolve_memory,
    // resolve_api, resolve_concurrency, others
    {96, 27, 44, 6, 13, 20, 44},
    {24, 17, 18, 2, 5, 3, 6},
    {6, 12, 8, 4, 7, 0, 0},
    {18, 34, 16, 4, 8, 0, 4},
    {32, 17, 10, 58, 23, 3, 7},
};
constexpr long long kAddCheckersLeaf[5][4] = {
    // add_checker_for_tensors_property, add_checker_for_overflow,
    // add_checker_for_null_pointer_dereference, add_checker_for_recursion
    {67, 13, 16, 0}, {13, 7, 3, 1}, {1, 4, 1, 0}, {7, 10, 1, 0}, {14, 1, 13, 4},
};

// Effort buckets per root-cause class (rows in class declaration order),
// columns micro / small / medium / large.
constexpr long long kEffortByRootCause[6][4] = {
    {61, 89, 46, 17},  // data_type_errors
    {72, 70, 26, 8},   // memory_errors
    {20, 37, 7, 4},    // api_errors
    {19, 21, 14, 4},   // business_logic_errors
    {14, 10, 4, 5},    // concurrency_errors
    {15, 13, 14, 6},   // others
};
// Representative added/deleted line counts landing inside each bucket.
constexpr long long kBucketLines[4][2] = {{3, 2}, {20, 15}, {80, 40}, {150, 100}};

// n items over k slots, as evenly as possible, remainder to the earliest slots.
std::vector<long long> balanced_fill(long long n, std::size_t k) {
  std::vector<long long> out(k, n / static_cast<long long>(k));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n % static_cast<long long>(k)); ++i) {
    out[i]++;
  }
  return out;
}

std::vector<VulnCategory> vuln_column(std::size_t li) {
  std::vector<VulnCategory> out;
  auto classes = all_vuln_classes();
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    VulnClass cls = classes[ci];
    auto leaves = subcategories_of(cls);
    std::vector<long long> counts;
    if (cls == VulnClass::Numeric) {
      counts.assign(std::begin(kNumericLeaf[li]), std::end(kNumericLeaf[li]));
    } else if (cls == VulnClass::Memory) {
      counts.assign(std::begin(kMemoryLeaf[li]), std::end(kMemoryLeaf[li]));
    } else {
      counts = balanced_fill(kVulnClass[li][ci], leaves.size());
    }
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      for (long long n = 0; n < counts[j]; ++n) out.push_back({cls, leaves[j]});
    }
  }
  return out;
}

std::vector<RootCause> root_cause_column(std::size_t li) {
  std::vector<RootCause> out;
  auto classes = all_root_cause_classes();
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    RootCauseClass cls = classes[ci];
    auto leaves = subcategories_of(cls);
    std::vector<long long> counts;
    if (cls == RootCauseClass::DataTypeErrors) {
      counts.assign(std::begin(kDataTypeLeaf[li]), std::end(kDataTypeLeaf[li]));
    } else if (cls == RootCauseClass::MemoryErrors) {
      counts.assign(std::begin(kMemoryErrLeaf[li]), std::end(kMemoryErrLeaf[li]));
    } else if (cls == RootCauseClass::ApiErrors) {
      counts.assign(std::begin(kApiLeaf[li]), std::end(kApiLeaf[li]));
    } else {
      counts = balanced_fill(kRootCauseClass[li][ci], leaves.size());
    }
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      for (long long n = 0; n < counts[j]; ++n) out.push_back({cls, leaves[j]});
    }
  }
  return out;
}

std::vector<Symptom> symptom_column(std::size_t li) {
  std::vector<Symptom> out;
  auto symptoms = all_symptoms();
  for (std::size_t si = 0; si < symptoms.size(); ++si) {
    for (long long n = 0; n < kSymptom[li][si]; ++n) out.push_back(symptoms[si]);
  }
  return out;
}

std::vector<FixingPattern> fixing_column(std::size_t li) {
  std::vector<FixingPattern> out;
  auto classes = all_fix_classes();
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    FixClass cls = classes[ci];
    auto leaves = subcategories_of(cls);
    std::vector<long long> counts;
    if (cls == FixClass::AddCheckers) {
      counts.assign(std::begin(kAddCheckersLeaf[li]), std::end(kAddCheckersLeaf[li]));
    } else {
      counts = balanced_fill(kFixClass[li][ci], leaves.size());
    }
    for (std::size_t j = 0; j < leaves.size(); ++j) {
      for (long long n = 0; n < counts[j]; ++n) out.push_back({cls, leaves[j]});
    }
  }
  return out;
}

}  // namespace

std::vector<VulnRecord> reference_dataset() {
  std::vector<VulnRecord> records;
  records.reserve(596);

  auto libraries = all_libraries();
  int tf_cve = 0;
  for (std::size_t li = 0; li < libraries.size(); ++li) {
    std::vector<VulnCategory> vulns = vuln_column(li);
    std::vector<RootCause> causes = root_cause_column(li);
    std::vector<Symptom> symptoms = symptom_column(li);
    std::vector<FixingPattern> fixes = fixing_column(li);
    for (std::size_t j = 0; j < vulns.size(); ++j) {
      VulnRecord record;
      char id[8];
      std::snprintf(id, sizeof(id), "V%04zu", records.size() + 1);
      record.id = id;
      record.library = libraries[li];
      record.vuln = vulns[j];
      record.root_cause = causes[j];
      record.symptom = symptoms[j];
      record.fixing = fixes[j];
      record.commit_ids = {util::sha256_hex(record.id).substr(0, 40)};
      if (record.library == Library::TensorFlow && tf_cve < 36) {
        char cve[16];
        std::snprintf(cve, sizeof(cve), "CVE-2021-%05d", 29501 + tf_cve);
        record.cve_ids = {cve};
        ++tf_cve;
      }
      records.push_back(std::move(record));
    }
  }

  // Effort is constrained per root-cause class, not per library: walk records
  // in id order and consume each class's bucket sequence.
  std::deque<EffortBucket> queues[6];
  auto buckets = all_effort_buckets();
  for (std::size_t ci = 0; ci < 6; ++ci) {
    for (std::size_t bi = 0; bi < 4; ++bi) {
      for (long long n = 0; n < kEffortByRootCause[ci][bi]; ++n) {
        queues[ci].push_back(buckets[bi]);
      }
    }
  }
  auto classes = all_root_cause_classes();
  for (VulnRecord& record : records) {
    std::size_t ci = 0;
    while (classes[ci] != record.root_cause.category) ++ci;
    EffortBucket bucket = queues[ci].front();
    queues[ci].pop_front();
    std::size_t bi = static_cast<std::size_t>(bucket);
    record.added_lines = kBucketLines[bi][0];
    record.deleted_lines = kBucketLines[bi][1];
  }
  return records;
}

}  // namespace mutforge
