#include "mutforge/taxonomy.hpp"

#include <algorithm>
#include <array>

namespace mutforge {

namespace {

template <typename E, std::size_t N>
struct NameTable {
  std::array<E, N> values;
  std::array<std::string_view, N> names;

  std::string_view name_of(E v) const {
    for (std::size_t i = 0; i < N; ++i) {
      if (values[i] == v) return names[i];
    }
    return "?";
  }
  std::optional<E> parse(std::string_view name) const {
    for (std::size_t i = 0; i < N; ++i) {
      if (names[i] == name) return values[i];
    }
    return std::nullopt;
  }
};

constexpr NameTable<Library, 5> kLibraries{
    {Library::TensorFlow, Library::PyTorch, Library::ScikitLearn, Library::Pandas,
     Library::Numpy},
    {"tensorflow", "pytorch", "scikit_learn", "pandas", "numpy"},
};

constexpr NameTable<VulnClass, 6> kVulnClasses{
    {VulnClass::Numeric, VulnClass::Memory, VulnClass::Buffer, VulnClass::Resource,
     VulnClass::Concurrency, VulnClass::Others},
    {"numeric", "memory", "buffer", "resource", "concurrency", "others"},
};

constexpr NameTable<VulnLeaf, 20> kVulnLeaves{
    {VulnLeaf::IntegerOverflow, VulnLeaf::InsufficientPrecision, VulnLeaf::DivisionByZero,
     VulnLeaf::IntegerUnderflow, VulnLeaf::MemoryLeak, VulnLeaf::NullPointerDereference,
     VulnLeaf::InfiniteLoop, VulnLeaf::DoubleFree, VulnLeaf::UseAfterFree,
     VulnLeaf::OutOfBoundRead, VulnLeaf::StackOverflow, VulnLeaf::HeapBufferOverflow,
     VulnLeaf::BufferOverflow, VulnLeaf::OutOfBoundWrite, VulnLeaf::UninitializedResource,
     VulnLeaf::ImproperInputValidation, VulnLeaf::FileDescriptorLeak, VulnLeaf::RaceCondition,
     VulnLeaf::Deadlock, VulnLeaf::None},
    {"integer_overflow", "insufficient_precision", "division_by_zero", "integer_underflow",
     "memory_leak", "null_pointer_dereference", "infinite_loop", "double_free",
     "use_after_free", "out_of_bound_read", "stack_overflow", "heap_buffer_overflow",
     "buffer_overflow", "out_of_bound_write", "uninitialized_resource",
     "improper_input_validation", "file_descriptor_leak", "race_condition", "deadlock",
     "none"},
};

constexpr NameTable<RootCauseClass, 6> kRootCauseClasses{
    {RootCauseClass::DataTypeErrors, RootCauseClass::MemoryErrors, RootCauseClass::ApiErrors,
     RootCauseClass::BusinessLogicErrors, RootCauseClass::ConcurrencyErrors,
     RootCauseClass::Others},
    {"data_type_errors", "memory_errors", "api_errors", "business_logic_errors",
     "concurrency_errors", "others"},
};

constexpr NameTable<RootCauseLeaf, 19> kRootCauseLeaves{
    {RootCauseLeaf::NumericalPrecisionError, RootCauseLeaf::TensorPropertyIssue,
     RootCauseLeaf::UsingImproperDataType, RootCauseLeaf::IncorrectTypeConversion,
     RootCauseLeaf::InvalidMemoryAccess, RootCauseLeaf::ImproperMemoryManagement,
     RootCauseLeaf::StackOrBufferSizeIssue, RootCauseLeaf::OutOfBoundRead,
     RootCauseLeaf::UsingWrongApi, RootCauseLeaf::ApiMisuse, RootCauseLeaf::MaliciousParameters,
     RootCauseLeaf::ApiVersionIssue, RootCauseLeaf::ImproperExceptionHandling,
     RootCauseLeaf::WrongOrderOfExecution, RootCauseLeaf::ImproperStringManipulation,
     RootCauseLeaf::MissingLockingStatement, RootCauseLeaf::ImproperResourceLocking,
     RootCauseLeaf::ImproperResourceReleasing, RootCauseLeaf::None},
    {"numerical_precision_error", "tensor_property_issue", "using_improper_data_type",
     "incorrect_type_conversion", "invalid_memory_access", "improper_memory_management",
     "stack_or_buffer_size_issue", "out_of_bound_read", "using_wrong_api", "api_misuse",
     "malicious_parameters", "api_version_issue", "improper_exception_handling",
     "wrong_order_of_execution", "improper_string_manipulation", "missing_locking_statement",
     "improper_resource_locking", "improper_resource_releasing", "none"},
};

constexpr NameTable<Symptom, 6> kSymptoms{
    {Symptom::SegmentationFault, Symptom::Crash, Symptom::UnexpectedBehavior,
     Symptom::ResourceConsumption, Symptom::Hang, Symptom::Others},
    {"segmentation_fault", "crash", "unexpected_behavior", "resource_consumption", "hang",
     "others"},
};

constexpr NameTable<FixClass, 7> kFixClasses{
    {FixClass::AddCheckers, FixClass::ModifyBusinessLogic, FixClass::ResolveDataTypeErrors,
     FixClass::ResolveMemoryErrors, FixClass::ResolveApiErrors,
     FixClass::ResolveConcurrencyErrors, FixClass::Others},
    {"add_checkers", "modify_business_logic", "resolve_data_type_errors",
     "resolve_memory_errors", "resolve_api_errors", "resolve_concurrency_errors", "others"},
};

constexpr NameTable<FixLeaf, 23> kFixLeaves{
    {FixLeaf::AddCheckerForTensorsProperty, FixLeaf::AddCheckerForOverflow,
     FixLeaf::AddCheckerForNullPointerDereference, FixLeaf::AddCheckerForRecursion,
     FixLeaf::ImprovedExceptionHandling, FixLeaf::ModifyFunctionReturnValue,
     FixLeaf::ModifyOrderOfExecution, FixLeaf::AvoidStackOverflowOnDeepGraphs,
     FixLeaf::ModifyIndexCalculation, FixLeaf::CloseFileHandler, FixLeaf::ModifyDataType,
     FixLeaf::IncreaseIntegerTypeRange, FixLeaf::HandleNumericalPrecision,
     FixLeaf::ConvertIntegerSign, FixLeaf::ManageMemoryRelease, FixLeaf::ResourceInitialization,
     FixLeaf::UseProperApi, FixLeaf::UpdateApiUsage, FixLeaf::UpdateApiVersion,
     FixLeaf::AddLockingMechanism, FixLeaf::ModifyLockingMechanism,
     FixLeaf::RemoveLockingMechanism, FixLeaf::None},
    {"add_checker_for_tensors_property", "add_checker_for_overflow",
     "add_checker_for_null_pointer_dereference", "add_checker_for_recursion",
     "improved_exception_handling", "modify_function_return_value", "modify_order_of_execution",
     "avoid_stack_overflow_on_deep_graphs", "modify_index_calculation", "close_file_handler",
     "modify_data_type", "increase_integer_type_range", "handle_numerical_precision",
     "convert_integer_sign", "manage_memory_release", "resource_initialization",
     "use_proper_api", "update_api_usage", "update_api_version", "add_locking_mechanism",
     "modify_locking_mechanism", "remove_locking_mechanism", "none"},
};

constexpr NameTable<EffortBucket, 4> kEffortBuckets{
    {EffortBucket::Micro, EffortBucket::Small, EffortBucket::Medium, EffortBucket::Large},
    {"micro", "small", "medium", "large"},
};

}  // namespace

std::string_view to_string(Library v) { return kLibraries.name_of(v); }
std::string_view to_string(VulnClass v) { return kVulnClasses.name_of(v); }
std::string_view to_string(VulnLeaf v) { return kVulnLeaves.name_of(v); }
std::string_view to_string(RootCauseClass v) { return kRootCauseClasses.name_of(v); }
std::string_view to_string(RootCauseLeaf v) { return kRootCauseLeaves.name_of(v); }
std::string_view to_string(Symptom v) { return kSymptoms.name_of(v); }
std::string_view to_string(FixClass v) { return kFixClasses.name_of(v); }
std::string_view to_string(FixLeaf v) { return kFixLeaves.name_of(v); }
std::string_view to_string(EffortBucket v) { return kEffortBuckets.name_of(v); }

std::optional<Library> parse_library(std::string_view s) { return kLibraries.parse(s); }
std::optional<VulnClass> parse_vuln_class(std::string_view s) { return kVulnClasses.parse(s); }
std::optional<VulnLeaf> parse_vuln_leaf(std::string_view s) { return kVulnLeaves.parse(s); }
std::optional<RootCauseClass> parse_root_cause_class(std::string_view s) {
  return kRootCauseClasses.parse(s);
}
std::optional<RootCauseLeaf> parse_root_cause_leaf(std::string_view s) {
  return kRootCauseLeaves.parse(s);
}
std::optional<Symptom> parse_symptom(std::string_view s) { return kSymptoms.parse(s); }
std::optional<FixClass> parse_fix_class(std::string_view s) { return kFixClasses.parse(s); }
std::optional<FixLeaf> parse_fix_leaf(std::string_view s) { return kFixLeaves.parse(s); }
std::optional<EffortBucket> parse_effort_bucket(std::string_view s) {
  return kEffortBuckets.parse(s);
}

std::span<const Library> all_libraries() { return kLibraries.values; }
std::span<const VulnClass> all_vuln_classes() { return kVulnClasses.values; }
std::span<const VulnLeaf> all_vuln_leaves() { return kVulnLeaves.values; }
std::span<const RootCauseClass> all_root_cause_classes() { return kRootCauseClasses.values; }
std::span<const RootCauseLeaf> all_root_cause_leaves() { return kRootCauseLeaves.values; }
std::span<const Symptom> all_symptoms() { return kSymptoms.values; }
std::span<const FixClass> all_fix_classes() { return kFixClasses.values; }
std::span<const FixLeaf> all_fix_leaves() { return kFixLeaves.values; }
std::span<const EffortBucket> all_effort_buckets() { return kEffortBuckets.values; }

VulnClass class_of(VulnLeaf leaf) {
  switch (leaf) {
    case VulnLeaf::IntegerOverflow:
    case VulnLeaf::InsufficientPrecision:
    case VulnLeaf::DivisionByZero:
    case VulnLeaf::IntegerUnderflow:
      return VulnClass::Numeric;
    case VulnLeaf::MemoryLeak:
    case VulnLeaf::NullPointerDereference:
    case VulnLeaf::InfiniteLoop:
    case VulnLeaf::DoubleFree:
    case VulnLeaf::UseAfterFree:
      return VulnClass::Memory;
    case VulnLeaf::OutOfBoundRead:
    case VulnLeaf::StackOverflow:
    case VulnLeaf::HeapBufferOverflow:
    case VulnLeaf::BufferOverflow:
    case VulnLeaf::OutOfBoundWrite:
      return VulnClass::Buffer;
    case VulnLeaf::UninitializedResource:
    case VulnLeaf::ImproperInputValidation:
    case VulnLeaf::FileDescriptorLeak:
      return VulnClass::Resource;
    case VulnLeaf::RaceCondition:
    case VulnLeaf::Deadlock:
      return VulnClass::Concurrency;
    case VulnLeaf::None:
      return VulnClass::Others;
  }
  return VulnClass::Others;
}

RootCauseClass class_of(RootCauseLeaf leaf) {
  switch (leaf) {
    case RootCauseLeaf::NumericalPrecisionError:
    case RootCauseLeaf::TensorPropertyIssue:
    case RootCauseLeaf::UsingImproperDataType:
    case RootCauseLeaf::IncorrectTypeConversion:
      return RootCauseClass::DataTypeErrors;
    case RootCauseLeaf::InvalidMemoryAccess:
    case RootCauseLeaf::ImproperMemoryManagement:
    case RootCauseLeaf::StackOrBufferSizeIssue:
    case RootCauseLeaf::OutOfBoundRead:
      return RootCauseClass::MemoryErrors;
    case RootCauseLeaf::UsingWrongApi:
    case RootCauseLeaf::ApiMisuse:
    case RootCauseLeaf::MaliciousParameters:
    case RootCauseLeaf::ApiVersionIssue:
      return RootCauseClass::ApiErrors;
    case RootCauseLeaf::ImproperExceptionHandling:
    case RootCauseLeaf::WrongOrderOfExecution:
    case RootCauseLeaf::ImproperStringManipulation:
      return RootCauseClass::BusinessLogicErrors;
    case RootCauseLeaf::MissingLockingStatement:
    case RootCauseLeaf::ImproperResourceLocking:
    case RootCauseLeaf::ImproperResourceReleasing:
      return RootCauseClass::ConcurrencyErrors;
    case RootCauseLeaf::None:
      return RootCauseClass::Others;
  }
  return RootCauseClass::Others;
}

FixClass class_of(FixLeaf leaf) {
  switch (leaf) {
    case FixLeaf::AddCheckerForTensorsProperty:
    case FixLeaf::AddCheckerForOverflow:
    case FixLeaf::AddCheckerForNullPointerDereference:
    case FixLeaf::AddCheckerForRecursion:
      return FixClass::AddCheckers;
    case FixLeaf::ImprovedExceptionHandling:
    case FixLeaf::ModifyFunctionReturnValue:
    case FixLeaf::ModifyOrderOfExecution:
    case FixLeaf::AvoidStackOverflowOnDeepGraphs:
    case FixLeaf::ModifyIndexCalculation:
    case FixLeaf::CloseFileHandler:
      return FixClass::ModifyBusinessLogic;
    case FixLeaf::ModifyDataType:
    case FixLeaf::IncreaseIntegerTypeRange:
    case FixLeaf::HandleNumericalPrecision:
    case FixLeaf::ConvertIntegerSign:
      return FixClass::ResolveDataTypeErrors;
    case FixLeaf::ManageMemoryRelease:
    case FixLeaf::ResourceInitialization:
      return FixClass::ResolveMemoryErrors;
    case FixLeaf::UseProperApi:
    case FixLeaf::UpdateApiUsage:
    case FixLeaf::UpdateApiVersion:
      return FixClass::ResolveApiErrors;
    case FixLeaf::AddLockingMechanism:
    case FixLeaf::ModifyLockingMechanism:
    case FixLeaf::RemoveLockingMechanism:
      return FixClass::ResolveConcurrencyErrors;
    case FixLeaf::None:
      return FixClass::Others;
  }
  return FixClass::Others;
}

bool is_member(VulnClass cls, VulnLeaf leaf) { return class_of(leaf) == cls; }
bool is_member(RootCauseClass cls, RootCauseLeaf leaf) { return class_of(leaf) == cls; }
bool is_member(FixClass cls, FixLeaf leaf) { return class_of(leaf) == cls; }

namespace {
template <typename Leaf, typename Cls>
std::span<const Leaf> leaves_in(std::span<const Leaf> all, Cls cls) {
  // Leaves are declared contiguously per category.
  std::size_t first = all.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (class_of(all[i]) == cls) {
      if (count == 0) first = i;
      ++count;
    }
  }
  return all.subspan(first, count);
}
}  // namespace

std::span<const VulnLeaf> subcategories_of(VulnClass cls) {
  return leaves_in(all_vuln_leaves(), cls);
}
std::span<const RootCauseLeaf> subcategories_of(RootCauseClass cls) {
  return leaves_in(all_root_cause_leaves(), cls);
}
std::span<const FixLeaf> subcategories_of(FixClass cls) {
  return leaves_in(all_fix_leaves(), cls);
}

std::optional<int> cwe_of(VulnLeaf leaf) {
  switch (leaf) {
    case VulnLeaf::IntegerOverflow: return 190;
    case VulnLeaf::InsufficientPrecision: return 1339;
    case VulnLeaf::DivisionByZero: return 369;
    case VulnLeaf::IntegerUnderflow: return 191;
    case VulnLeaf::MemoryLeak: return 401;
    case VulnLeaf::NullPointerDereference: return 476;
    case VulnLeaf::InfiniteLoop: return 835;
    case VulnLeaf::DoubleFree: return 415;
    case VulnLeaf::UseAfterFree: return 416;
    case VulnLeaf::OutOfBoundRead: return 125;
    case VulnLeaf::StackOverflow: return 121;
    case VulnLeaf::HeapBufferOverflow: return 122;
    case VulnLeaf::BufferOverflow: return 120;
    case VulnLeaf::OutOfBoundWrite: return 787;
    case VulnLeaf::UninitializedResource: return 908;
    case VulnLeaf::ImproperInputValidation: return 20;
    case VulnLeaf::FileDescriptorLeak: return 403;
    case VulnLeaf::RaceCondition: return 362;
    case VulnLeaf::Deadlock: return 833;
    case VulnLeaf::None: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> cwe_of(const VulnCategory& category) { return cwe_of(category.subcategory); }

EffortBucket classify_effort(long long added, long long deleted) {
  long long total = added + deleted;
  if (total > 200) return EffortBucket::Large;
  if (total > 50) return EffortBucket::Medium;
  if (total > 10) return EffortBucket::Small;
  return EffortBucket::Micro;
}

LabelValidation validate_label(const VulnRecord& record) {
  LabelValidation result;
  if (!is_member(record.vuln.category, record.vuln.subcategory)) {
    result.violations.push_back(
        "subcategory not in category: vuln " + std::string(to_string(record.vuln.category)) +
        "/" + std::string(to_string(record.vuln.subcategory)));
  }
  if (!is_member(record.root_cause.category, record.root_cause.subcategory)) {
    result.violations.push_back("subcategory not in category: root_cause " +
                                std::string(to_string(record.root_cause.category)) + "/" +
                                std::string(to_string(record.root_cause.subcategory)));
  }
  if (!is_member(record.fixing.category, record.fixing.subcategory)) {
    result.violations.push_back(
        "subcategory not in category: fixing " + std::string(to_string(record.fixing.category)) +
        "/" + std::string(to_string(record.fixing.subcategory)));
  }
  if (record.added_lines < 0 || record.deleted_lines < 0) {
    result.violations.push_back("negative effort: added=" + std::to_string(record.added_lines) +
                                " deleted=" + std::to_string(record.deleted_lines));
  }
  if (record.commit_ids.empty()) {
    result.violations.push_back("commit_ids empty");
  }
  return result;
}

}  // namespace mutforge
