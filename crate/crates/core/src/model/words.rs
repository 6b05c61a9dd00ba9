//! Static word catalogs: reserved words, special registers, statement verbs.
//!
//! The reserved-word list is the union of the COBOL 2002 reserved words and
//! the common IBM Enterprise COBOL extensions. Special registers follow the
//! IBM language reference. Lookups are case-insensitive.

use std::collections::HashSet;
use std::sync::OnceLock;

const RESERVED: &str = "
ACCEPT ACCESS ACTIVE-CLASS ADD ADDRESS ADVANCING AFTER ALIGNED ALL ALLOCATE ALPHABET
ALPHABETIC ALPHABETIC-LOWER ALPHABETIC-UPPER ALPHANUMERIC ALPHANUMERIC-EDITED ALSO ALTER
ALTERNATE AND ANY ANYCASE APPLY ARE AREA AREAS AS ASCENDING ASSIGN AT AUTHOR B-AND B-NOT
B-OR B-XOR BASED BASIS BEFORE BEGINNING BINARY BINARY-CHAR BINARY-DOUBLE BINARY-LONG
BINARY-SHORT BIT BLANK BLOCK BOOLEAN BOTTOM BY CALL CANCEL CBL CD CF CH CHARACTER
CHARACTERS CLASS CLASS-ID CLOCK-UNITS CLOSE COBOL CODE CODE-SET COL COLLATING COLS COLUMN
COLUMNS COM-REG COMMA COMMON COMMUNICATION COMP COMP-1 COMP-2 COMP-3 COMP-4 COMP-5
COMPUTATIONAL COMPUTATIONAL-1 COMPUTATIONAL-2 COMPUTATIONAL-3 COMPUTATIONAL-4
COMPUTATIONAL-5 COMPUTE CONDITION CONFIGURATION CONSTANT CONTAINS CONTENT CONTINUE CONTROL
CONTROLS CONVERTING COPY CORR CORRESPONDING COUNT CRT CURRENCY CURSOR DATA DATA-POINTER
DATE DATE-COMPILED DATE-WRITTEN DAY DAY-OF-WEEK DBCS DE DEBUG-CONTENTS DEBUG-ITEM
DEBUG-LINE DEBUG-NAME DEBUG-SUB-1 DEBUG-SUB-2 DEBUG-SUB-3 DEBUGGING DECIMAL-POINT
DECLARATIVES DEFAULT DELETE DELIMITED DELIMITER DEPENDING DESCENDING DESTINATION DETAIL
DISABLE DISPLAY DISPLAY-1 DIVIDE DIVISION DOWN DUPLICATES DYNAMIC EC EGCS EGI EJECT ELSE
EMI ENABLE END END-ACCEPT END-ADD END-CALL END-COMPUTE END-DELETE END-DISPLAY END-DIVIDE
END-EVALUATE END-EXEC END-IF END-INVOKE END-JSON END-MULTIPLY END-OF-PAGE END-PERFORM
END-READ END-RECEIVE END-RETURN END-REWRITE END-SEARCH END-START END-STRING END-SUBTRACT
END-UNSTRING END-WRITE END-XML ENDING ENTER ENTRY ENVIRONMENT EO EOP EQUAL EQUALS ERROR
ESI EVALUATE EVERY EXCEPTION EXCEPTION-OBJECT EXCLUSIVE EXEC EXECUTE EXIT EXTEND EXTERNAL
FACTORY FALSE FD FILE FILE-CONTROL FILLER FINAL FIRST FLOAT-EXTENDED FLOAT-LONG
FLOAT-SHORT FOOTING FOR FORMAT FREE FROM FUNCTION FUNCTION-ID FUNCTION-POINTER GENERATE
GET GIVING GLOBAL GO GOBACK GREATER GROUP GROUP-USAGE HEADING HIGH-VALUE HIGH-VALUES I-O
I-O-CONTROL ID IDENTIFICATION IF IN INDEX INDEXED INDICATE INHERITS INITIAL INITIALIZE
INITIATE INPUT INPUT-OUTPUT INSERT INSPECT INSTALLATION INTERFACE INTERFACE-ID INTO
INVALID INVOKE IS JAVA JNIENVPTR JSON JSON-CODE JSON-STATUS JUST JUSTIFIED KANJI KEY
LABEL LAST LEADING LEFT LENGTH LESS LIMIT LIMITS LINAGE LINAGE-COUNTER LINE LINE-COUNTER
LINES LINKAGE LOCAL-STORAGE LOCALE LOCK LOW-VALUE LOW-VALUES MEMORY MERGE MESSAGE METHOD
METHOD-ID MINUS MODE MODULES MORE-LABELS MOVE MULTIPLE MULTIPLY NATIONAL NATIONAL-EDITED
NATIVE NEGATIVE NESTED NEXT NO NOT NULL NULLS NUMBER NUMERIC NUMERIC-EDITED OBJECT
OBJECT-COMPUTER OBJECT-REFERENCE OCCURS OF OFF OMITTED ON OPEN OPTIONAL OPTIONS OR ORDER
ORGANIZATION OTHER OUTPUT OVERFLOW OVERRIDE PACKED-DECIMAL PADDING PAGE PAGE-COUNTER
PASSWORD PERFORM PF PH PIC PICTURE PLUS POINTER POSITION POSITIVE PRESENT PREVIOUS
PRINTING PROCEDURE PROCEDURE-POINTER PROCEDURES PROCEED PROCESSING PROGRAM PROGRAM-ID
PROGRAM-POINTER PROPERTY PROTOTYPE PURGE QUEUE QUOTE QUOTES RAISE RAISING RANDOM RD READ
READY RECEIVE RECORD RECORDING RECORDS RECURSIVE REDEFINES REEL REFERENCE REFERENCES
RELATIVE RELEASE RELOAD REMAINDER REMOVAL RENAMES REPLACE REPLACING REPORT REPORTING
REPORTS REPOSITORY RERUN RESERVE RESET RESUME RETRY RETURN RETURN-CODE RETURNING REVERSED
REWIND REWRITE RF RH RIGHT ROUNDED RUN SAME SCREEN SD SEARCH SECTION SECURITY SEGMENT
SEGMENT-LIMIT SELECT SELF SEND SENTENCE SEPARATE SEQUENCE SEQUENTIAL SERVICE SET SHARING
SHIFT-IN SHIFT-OUT SIGN SIZE SKIP1 SKIP2 SKIP3 SORT SORT-CONTROL SORT-CORE-SIZE
SORT-FILE-SIZE SORT-MERGE SORT-MESSAGE SORT-MODE-SIZE SORT-RETURN SOURCE SOURCE-COMPUTER
SOURCES SPACE SPACES SPECIAL-NAMES SQL SQLIMS STANDARD STANDARD-1 STANDARD-2 START STATUS
STOP STRING SUB-QUEUE-1 SUB-QUEUE-2 SUB-QUEUE-3 SUBTRACT SUM SUPER SUPPRESS SYMBOLIC SYNC
SYNCHRONIZED SYSTEM-DEFAULT TABLE TALLY TALLYING TAPE TERMINAL TERMINATE TEST TEXT THAN
THEN THROUGH THRU TIME TIMES TITLE TO TOP TRACE TRAILING TRUE TYPE TYPEDEF UNIT UNIVERSAL
UNLOCK UNSTRING UNTIL UP UPON USAGE USE USER-DEFAULT USING VAL-STATUS VALID VALIDATE
VALIDATE-STATUS VALUE VALUES VARYING VOLATILE WHEN WHEN-COMPILED WITH WORDS WORKING-STORAGE
WRITE WRITE-ONLY XML XML-CODE XML-EVENT XML-INFORMATION XML-NAMESPACE XML-NAMESPACE-PREFIX
XML-NNAMESPACE XML-NNAMESPACE-PREFIX XML-NTEXT XML-SCHEMA XML-TEXT ZERO ZEROES ZEROS
";

/// Compiler-provided registers, exempt from renaming.
pub const SPECIAL_REGISTERS: &[&str] = &[
    "ADDRESS",
    "DEBUG-ITEM",
    "JNIENVPTR",
    "JSON-CODE",
    "JSON-STATUS",
    "LENGTH",
    "LINAGE-COUNTER",
    "RETURN-CODE",
    "SHIFT-IN",
    "SHIFT-OUT",
    "SORT-CONTROL",
    "SORT-CORE-SIZE",
    "SORT-FILE-SIZE",
    "SORT-MESSAGE",
    "SORT-MODE-SIZE",
    "SORT-RETURN",
    "TALLY",
    "WHEN-COMPILED",
    "XML-CODE",
    "XML-EVENT",
    "XML-INFORMATION",
    "XML-NAMESPACE",
    "XML-NAMESPACE-PREFIX",
    "XML-NNAMESPACE",
    "XML-NNAMESPACE-PREFIX",
    "XML-NTEXT",
    "XML-TEXT",
];

/// Words that begin an imperative or conditional statement.
const VERBS: &str = "
ACCEPT ADD ALLOCATE ALTER CALL CANCEL CLOSE COMPUTE CONTINUE DELETE DISPLAY DIVIDE ENTRY
EVALUATE EXEC EXIT FREE GENERATE GO GOBACK IF INITIALIZE INITIATE INSPECT INVOKE JSON MERGE
MOVE MULTIPLY NEXT OPEN PERFORM RAISE READ RECEIVE RELEASE RESUME RETURN REWRITE SEARCH
SEND SET SORT START STOP STRING SUBTRACT SUPPRESS TERMINATE UNLOCK UNSTRING USE VALIDATE
WRITE XML
";

/// Reserved words that may appear inside an IF condition.
const CONDITION_WORDS: &str = "
ALL ALPHABETIC ALPHABETIC-LOWER ALPHABETIC-UPPER AND ADDRESS DBCS EQUAL EQUALS FALSE
FUNCTION GREATER HIGH-VALUE HIGH-VALUES IN IS KANJI LENGTH LESS LOW-VALUE LOW-VALUES
NEGATIVE NOT NULL NULLS NUMERIC OF OMITTED OR POSITIVE QUOTE QUOTES RETURN-CODE SPACE SPACES
TALLY THAN TO TRUE ZERO ZEROES ZEROS
";

fn set(src: &'static str) -> HashSet<&'static str> {
    src.split_whitespace().collect()
}

fn reserved_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| set(RESERVED))
}

fn verb_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| set(VERBS))
}

fn condition_set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| set(CONDITION_WORDS))
}

pub fn is_reserved(word: &str) -> bool {
    reserved_set().contains(word.to_ascii_uppercase().as_str())
}

pub fn is_special_register(word: &str) -> bool {
    let up = word.to_ascii_uppercase();
    SPECIAL_REGISTERS.contains(&up.as_str())
}

pub fn is_verb(word: &str) -> bool {
    verb_set().contains(word.to_ascii_uppercase().as_str())
}

pub fn is_condition_word(word: &str) -> bool {
    condition_set().contains(word.to_ascii_uppercase().as_str())
}

/// Whether `word` is a syntactically valid user-defined COBOL word.
pub fn is_valid_user_word(word: &str) -> bool {
    let len = word.chars().count();
    (1..=30).contains(&len)
        && word
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        && word.chars().any(|c| c.is_ascii_alphabetic())
        && !word.starts_with('-')
        && !word.ends_with('-')
}
