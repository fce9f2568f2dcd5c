#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mutforge {

// Classification scheme for security vulnerabilities in ML libraries:
// vulnerability types (with CWE links), root causes, symptoms, fixing
// patterns, and fixing-effort buckets. All enums have canonical
// lower_snake_case names used in every file format and report;
// parse/print round-trips losslessly.

enum class Library {
  TensorFlow,
  PyTorch,
  ScikitLearn,
  Pandas,
  Numpy,
};

enum class VulnClass {
  Numeric,
  Memory,
  Buffer,
  Resource,
  Concurrency,
  Others,
};

enum class VulnLeaf {
  // Numeric
  IntegerOverflow,
  InsufficientPrecision,
  DivisionByZero,
  IntegerUnderflow,
  // Memory
  MemoryLeak,
  NullPointerDereference,
  InfiniteLoop,
  DoubleFree,
  UseAfterFree,
  // Buffer
  OutOfBoundRead,
  StackOverflow,
  HeapBufferOverflow,
  BufferOverflow,
  OutOfBoundWrite,
  // Resource
  UninitializedResource,
  ImproperInputValidation,
  FileDescriptorLeak,
  // Concurrency
  RaceCondition,
  Deadlock,
  // Others (unclassified leaf)
  None,
};

enum class RootCauseClass {
  DataTypeErrors,
  MemoryErrors,
  ApiErrors,
  BusinessLogicErrors,
  ConcurrencyErrors,
  Others,
};

enum class RootCauseLeaf {
  // Data type errors
  NumericalPrecisionError,
  TensorPropertyIssue,
  UsingImproperDataType,
  IncorrectTypeConversion,
  // Memory errors
  InvalidMemoryAccess,
  ImproperMemoryManagement,
  StackOrBufferSizeIssue,
  OutOfBoundRead,
  // API errors
  UsingWrongApi,
  ApiMisuse,
  MaliciousParameters,
  ApiVersionIssue,
  // Business logic errors
  ImproperExceptionHandling,
  WrongOrderOfExecution,
  ImproperStringManipulation,
  // Concurrency errors
  MissingLockingStatement,
  ImproperResourceLocking,
  ImproperResourceReleasing,
  // Others
  None,
};

enum class Symptom {
  SegmentationFault,
  Crash,
  UnexpectedBehavior,
  ResourceConsumption,
  Hang,
  Others,
};

enum class FixClass {
  AddCheckers,
  ModifyBusinessLogic,
  ResolveDataTypeErrors,
  ResolveMemoryErrors,
  ResolveApiErrors,
  ResolveConcurrencyErrors,
  Others,
};

enum class FixLeaf {
  // Add checkers
  AddCheckerForTensorsProperty,
  AddCheckerForOverflow,
  AddCheckerForNullPointerDereference,
  AddCheckerForRecursion,
  // Modify business logic
  ImprovedExceptionHandling,
  ModifyFunctionReturnValue,
  ModifyOrderOfExecution,
  AvoidStackOverflowOnDeepGraphs,
  ModifyIndexCalculation,
  CloseFileHandler,
  // Resolve data type errors
  ModifyDataType,
  IncreaseIntegerTypeRange,
  HandleNumericalPrecision,
  ConvertIntegerSign,
  // Resolve memory errors
  ManageMemoryRelease,
  ResourceInitialization,
  // Resolve API errors
  UseProperApi,
  UpdateApiUsage,
  UpdateApiVersion,
  // Resolve concurrency errors
  AddLockingMechanism,
  ModifyLockingMechanism,
  RemoveLockingMechanism,
  // Others
  None,
};

enum class EffortBucket {
  Micro,
  Small,
  Medium,
  Large,
};

struct VulnCategory {
  VulnClass category = VulnClass::Others;
  VulnLeaf subcategory = VulnLeaf::None;
  friend bool operator==(const VulnCategory&, const VulnCategory&) = default;
};

struct RootCause {
  RootCauseClass category = RootCauseClass::Others;
  RootCauseLeaf subcategory = RootCauseLeaf::None;
  friend bool operator==(const RootCause&, const RootCause&) = default;
};

struct FixingPattern {
  FixClass category = FixClass::Others;
  FixLeaf subcategory = FixLeaf::None;
  friend bool operator==(const FixingPattern&, const FixingPattern&) = default;
};

// Canonical names and enum iteration.
std::string_view to_string(Library v);
std::string_view to_string(VulnClass v);
std::string_view to_string(VulnLeaf v);
std::string_view to_string(RootCauseClass v);
std::string_view to_string(RootCauseLeaf v);
std::string_view to_string(Symptom v);
std::string_view to_string(FixClass v);
std::string_view to_string(FixLeaf v);
std::string_view to_string(EffortBucket v);

std::optional<Library> parse_library(std::string_view name);
std::optional<VulnClass> parse_vuln_class(std::string_view name);
std::optional<VulnLeaf> parse_vuln_leaf(std::string_view name);
std::optional<RootCauseClass> parse_root_cause_class(std::string_view name);
std::optional<RootCauseLeaf> parse_root_cause_leaf(std::string_view name);
std::optional<Symptom> parse_symptom(std::string_view name);
std::optional<FixClass> parse_fix_class(std::string_view name);
std::optional<FixLeaf> parse_fix_leaf(std::string_view name);
std::optional<EffortBucket> parse_effort_bucket(std::string_view name);

std::span<const Library> all_libraries();
std::span<const VulnClass> all_vuln_classes();
std::span<const VulnLeaf> all_vuln_leaves();
std::span<const RootCauseClass> all_root_cause_classes();
std::span<const RootCauseLeaf> all_root_cause_leaves();
std::span<const Symptom> all_symptoms();
std::span<const FixClass> all_fix_classes();
std::span<const FixLeaf> all_fix_leaves();
std::span<const EffortBucket> all_effort_buckets();

// Category membership. The partition is total: every leaf (including the
// unclassified None leaf, which belongs to Others) has exactly one parent.
VulnClass class_of(VulnLeaf leaf);
RootCauseClass class_of(RootCauseLeaf leaf);
FixClass class_of(FixLeaf leaf);
bool is_member(VulnClass cls, VulnLeaf leaf);
bool is_member(RootCauseClass cls, RootCauseLeaf leaf);
bool is_member(FixClass cls, FixLeaf leaf);
std::span<const VulnLeaf> subcategories_of(VulnClass cls);
std::span<const RootCauseLeaf> subcategories_of(RootCauseClass cls);
std::span<const FixLeaf> subcategories_of(FixClass cls);

// CWE identifier for vulnerability leaves that carry one; absent for the
// unclassified leaf.
std::optional<int> cwe_of(VulnLeaf leaf);
std::optional<int> cwe_of(const VulnCategory& category);

// Effort bucket from total changed lines (added + deleted):
// Micro [0,10], Small (10,50], Medium (50,200], Large (200,inf).
EffortBucket classify_effort(long long added, long long deleted);

// One labeled vulnerability.
struct VulnRecord {
  std::string id;
  Library library = Library::TensorFlow;
  VulnCategory vuln;
  RootCause root_cause;
  Symptom symptom = Symptom::Others;
  FixingPattern fixing;
  long long added_lines = 0;
  long long deleted_lines = 0;
  std::vector<std::string> commit_ids;
  std::vector<std::string> cve_ids;

  long long lines_changed() const { return added_lines + deleted_lines; }
  EffortBucket effort() const { return classify_effort(added_lines, deleted_lines); }
  friend bool operator==(const VulnRecord&, const VulnRecord&) = default;
};

struct LabelValidation {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Flags category/subcategory mismatches, negative line counts and missing
// commit ids. Unknown enum values cannot be represented here; the dataset
// loader rejects them at parse time.
LabelValidation validate_label(const VulnRecord& record);

}  // namespace mutforge
